"""Write the golden PNGs used by test_render / test_compose."""
import sys
from pathlib import Path

from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))
from golden_fixtures import GOLDEN_DIR, render_goldens  # noqa: E402

if __name__ == "__main__":
    GOLDEN_DIR.mkdir(exist_ok=True)
    for name, raster in render_goldens().items():
        Image.fromarray(raster).save(GOLDEN_DIR / f"{name}.png")
        print(name, raster.shape)
