import subprocess
import sys

import pytest

from nmt_adapter.models import PhraseTableModel
from nmt_adapter.server import TranslationServer

BASE_TABLE = """\
the\tde
king\tkoning
sleeps\tslaapt
that\tdat
said\tzei
hello\thallo
"""


@pytest.fixture()
def phrase_table(tmp_path):
    path = tmp_path / "model.tsv"
    path.write_text(BASE_TABLE, encoding="utf-8")
    return path


@pytest.fixture()
def server(phrase_table):
    srv = TranslationServer(PhraseTableModel.load(phrase_table)).start_background()
    yield srv
    srv.shutdown()


def run_compoeval(*args):
    """Drive the evaluation toolkit through its CLI (external interface)."""
    return subprocess.run(
        [sys.executable, "-m", "compoeval.cli", *args],
        capture_output=True,
        text=True,
    )
