"""Exception types shared across the package."""


class CarpError(Exception):
    """Base class for every error raised by this package."""


class InvalidImageError(CarpError, ValueError):
    """Pixel data does not satisfy the container's contract."""


class InvalidQuadError(CarpError, ValueError):
    """Four points that cannot form a usable card quadrilateral."""


class HomographyError(CarpError, ValueError):
    """Perspective estimation failed (degenerate correspondences)."""


class InvalidCardAspectError(CarpError, ValueError):
    """Reprojected card aspect ratio falls outside the playing-card range."""


class ImageTooSmallError(CarpError, ValueError):
    """Image too small to produce a non-empty corner crop."""


class NotARankError(CarpError, ValueError):
    """Card label (e.g. BACK) has no blackjack rank."""


class InvalidHandError(CarpError, ValueError):
    """Player hand cannot be evaluated (fewer than two cards)."""


class UpcardNotVisibleError(CarpError, ValueError):
    """Every dealer card is face down."""


class TrainingDataError(CarpError, ValueError):
    """Training directory missing, malformed, or containing bad patches."""


class SceneSpecError(CarpError, ValueError):
    """Synthetic scene request violates layout constraints."""
