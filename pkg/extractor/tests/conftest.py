import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def image_dir(tmp_path):
    """A few deterministic RGB images of differing content."""
    d = tmp_path / "images"
    d.mkdir()
    h = w = 96
    yy, xx = np.mgrid[0:h, 0:w]
    patterns = [
        np.stack([xx * 255 // w, yy * 255 // h, (xx + yy) * 255 // (h + w)], axis=-1),
        np.stack([255 - xx * 255 // w, (xx * yy) % 256, yy * 255 // h], axis=-1),
        np.stack([(xx // 8 % 2) * 255, (yy // 8 % 2) * 255, ((xx + yy) // 8 % 2) * 255],
                 axis=-1),
    ]
    for i, arr in enumerate(patterns):
        Image.fromarray(arr.astype(np.uint8), "RGB").save(d / f"img{i}.png")
    return d
