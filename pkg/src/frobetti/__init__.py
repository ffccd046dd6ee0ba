"""frobetti: exact linear algebra over GF(p) driving inverse systems,
link generator profiles, Koszul strand homology, graded Betti tables,
matrix factorizations, and Hilbert-Kunz functions for hypersurface rings.

Submodule attributes are re-exported lazily so that importing the
package (in particular the command line entry point) does not pull in
numpy before thread-count environment variables are settled.
"""

__version__ = "0.1.0"

_FFLA_NAMES = frozenset(
    ["FMatrix", "Prime", "is_prime", "kernel_basis", "left_kernel", "rank", "rref"]
)

__all__ = sorted(_FFLA_NAMES) + ["__version__"]


def __getattr__(name):
    if name in _FFLA_NAMES:
        from . import ffla

        return getattr(ffla, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
