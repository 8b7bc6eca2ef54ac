import os
import sys

# ctest sets DBARLAB_PYTHON_PACKAGE to the package tree in the build directory.
# An editable install registers an import hook that would otherwise shadow it.
_pkg = os.environ.get("DBARLAB_PYTHON_PACKAGE")
if _pkg:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, _pkg)
    sys.modules.pop("dbarlab", None)
