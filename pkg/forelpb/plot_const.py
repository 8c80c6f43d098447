from typing import Final

DEFAULT_TITLE: Final = "FoReL trajectory"

DEFAULT_DPI: Final = 100

DEFAULT_FIGSIZE: Final = (6.0, 4.5)

# at most this many coordinate-pair panels in a projection figure
MAX_PROJECTION_PANELS: Final = 6

DEFAULT_SVG_HASHSALT: Final = "forelpb"
