import os
import sys
from pathlib import Path

# Prefer an installed wheel; otherwise load the extension straight from the
# CMake build tree (ctest sets MPTCS_BUILD_DIR).
try:
    import mptcs  # noqa: F401
except ImportError:
    build_dir = os.environ.get("MPTCS_BUILD_DIR")
    source_dir = os.environ.get("MPTCS_SOURCE_DIR")
    if not build_dir or not source_dir:
        raise
    sys.path.insert(0, str(Path(source_dir) / "python"))
    sys.path.insert(0, build_dir)
    import _core

    sys.modules["mptcs._core"] = _core
    import mptcs  # noqa: F401
