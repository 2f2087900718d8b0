"""Capture post-ReLU feature maps from pretrained CNNs and write them as
a fixed-point TNSR corpus.

Every application of a ReLU module during the forward pass yields one
feature map (some networks apply the same module instance twice per
block, so maps are keyed by module path plus call index). Each captured
tensor is quantized on its own to the full m-bit range: q = round(v /
max(v) * (2^m - 1)), an all-zero map staying all-zero. That normalization
uses the whole range per tensor, the worst case for downstream
compression.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch import nn
from torchvision import models, transforms

NETWORKS = {
    "alexnet": models.alexnet,
    "resnet34": models.resnet34,
    "squeezenet": models.squeezenet1_0,
}

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".bmp", ".ppm", ".webp"}

_PREPROCESS = transforms.Compose(
    [
        transforms.Resize(256),
        transforms.CenterCrop(224),
        transforms.ToTensor(),
        transforms.Normalize(mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]),
    ]
)


@dataclass(frozen=True)
class ExtractionConfig:
    network: str
    image_dir: Path
    out_dir: Path
    m: int = 16
    max_images: int | None = None
    pretrained: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.network not in NETWORKS:
            raise ValueError(f"network {self.network!r} not in {sorted(NETWORKS)}")
        if self.m not in (8, 16, 32):
            raise ValueError(f"word width m={self.m} not in (8, 16, 32)")


@dataclass
class ExtractionReport:
    manifest_path: Path | None = None
    written: list[Path] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


def build_model(name: str, pretrained: bool = True, seed: int = 0) -> nn.Module:
    if pretrained:
        model = NETWORKS[name](weights="DEFAULT")
    else:
        torch.manual_seed(seed)
        model = NETWORKS[name](weights=None)
    model.eval()
    return model


def relu_feature_maps(model: nn.Module, batch: torch.Tensor) -> list[tuple[str, torch.Tensor]]:
    """Run one forward pass and return (layer label, output) for every
    ReLU application, in execution order."""
    captured: list[tuple[str, torch.Tensor]] = []
    calls: dict[str, int] = {}
    handles = []

    def make_hook(name: str):
        def hook(module, inputs, output):
            idx = calls.get(name, 0)
            calls[name] = idx + 1
            captured.append((f"{name}#{idx}", output.detach()))

        return hook

    for name, module in model.named_modules():
        if isinstance(module, nn.ReLU):
            handles.append(module.register_forward_hook(make_hook(name)))
    try:
        with torch.no_grad():
            model(batch)
    finally:
        for h in handles:
            h.remove()
    return captured


def quantize(values: np.ndarray, m: int) -> np.ndarray:
    """Per-tensor full-range quantization; monotone, exact top code for
    the maximum, all-zero in stays all-zero out."""
    top = (1 << m) - 1
    arr = np.asarray(values, dtype=np.float64)
    peak = float(arr.max()) if arr.size else 0.0
    dtype = {8: np.uint8, 16: np.uint16, 32: np.uint32}[m]
    if peak <= 0.0:
        return np.zeros(arr.shape, dtype=dtype)
    q = np.rint(arr / peak * top)
    return np.clip(q, 0, top).astype(dtype)


def _to_4d(t: torch.Tensor) -> tuple[int, int, int, int]:
    if t.dim() == 4:
        n, c, h, w = t.shape
    elif t.dim() == 2:
        n, c = t.shape
        h = w = 1
    else:
        raise ValueError(f"cannot lay out a {t.dim()}-D feature map")
    return int(n), int(c), int(h), int(w)


def list_images(image_dir: Path, max_images: int | None = None) -> list[Path]:
    paths = sorted(
        p for p in Path(image_dir).iterdir()
        if p.suffix.lower() in IMAGE_EXTENSIONS and p.is_file()
    )
    return paths[:max_images] if max_images else paths


def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", label)


def extract(config: ExtractionConfig, model: nn.Module | None = None) -> ExtractionReport:
    """Run the network on every readable image and write one TNSR file
    per ReLU application (batch 1, NCHW), plus the corpus manifest.
    Unreadable images are reported and skipped; the partial corpus stays
    valid."""
    from .tnsr import write_manifest, write_tensor

    report = ExtractionReport()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if model is None:
        model = build_model(config.network, config.pretrained, config.seed)

    images = list_images(config.image_dir, config.max_images)
    if not images:
        report.errors.append(f"no images found in {config.image_dir}")
        return report

    entries: list[dict] = []
    for image_path in images:
        try:
            with Image.open(image_path) as img:
                batch = _PREPROCESS(img.convert("RGB")).unsqueeze(0)
        except (OSError, ValueError) as e:
            report.errors.append(f"{image_path}: {e}")
            continue
        for layer, fmap in relu_feature_maps(model, batch):
            dims = _to_4d(fmap)
            words = quantize(fmap.numpy().reshape(-1), config.m)
            name = f"{config.network}_m{config.m}_{_safe(image_path.stem)}_{_safe(layer)}.tnsr"
            path = out_dir / name
            write_tensor(path, words, dims, config.m, layout="NCHW")
            report.written.append(path)
            entries.append(
                {"path": path, "network": config.network, "layer": layer, "m": config.m}
            )

    if entries:
        manifest = out_dir / "manifest.json"
        merged = entries
        if manifest.exists():
            from .tnsr import read_manifest

            new_paths = {Path(e["path"]) for e in entries}
            merged = [
                e for e in read_manifest(manifest) if Path(e["path"]) not in new_paths
            ] + entries
        write_manifest(manifest, merged)
        report.manifest_path = manifest
    return report
