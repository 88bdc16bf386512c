"""Reference bridge exposing trained NMT checkpoints behind the
compoeval HTTP and file translation protocols, with multi-checkpoint
sweeps for training-course analyses."""

from .models import Checkpoint, CheckpointSet, ModelError, PhraseTableModel, load_model
from .server import TranslationServer
from .sweep import read_sources, sweep

__version__ = "0.1.0"
