"""Fixed vocabularies and default dimensions shared across the pipeline."""

from importlib import resources
from pathlib import Path

# EMOTIC discrete categories, in the dataset's canonical order.
EMOTIONS = (
    "Affection",
    "Anger",
    "Annoyance",
    "Anticipation",
    "Aversion",
    "Confidence",
    "Disapproval",
    "Disconnection",
    "Disquietment",
    "Doubt/Confusion",
    "Embarrassment",
    "Engagement",
    "Esteem",
    "Excitement",
    "Fatigue",
    "Fear",
    "Happiness",
    "Pain",
    "Peace",
    "Pleasure",
    "Sadness",
    "Sensitivity",
    "Suffering",
    "Surprise",
    "Sympathy",
    "Yearning",
)
N_EMOTIONS = len(EMOTIONS)
N_VAD = 3
EMBED_DIM = 50
N_MOODS = 2
N_RELATED = 5

DEFAULT_WINDOW = 3
DEFAULT_SEED = 0


def emotion_key(name):
    """Embedding lookup key for an emotion category name ("Doubt/Confusion" -> "doubt_confusion")."""
    return name.lower().replace("/", "_")


def data_path(name):
    """Path of a bundled data asset."""
    return Path(str(resources.files("emograph") / "data" / name))
