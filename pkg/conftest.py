import pathlib
import sys

# Repo-Wurzel auf sys.path, damit "blocks.components..." wie in scripts/ importierbar ist
ROOT = pathlib.Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))
