"""
Run manifest: what produced an output directory and a digest of its files.

The digest is SHA-256 over every output file except the manifest itself,
visited in sorted relative-path order, feeding ``name NUL bytes NUL`` for
each.  Identical inputs therefore give identical manifests.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

from . import __version__
from .errors import InputError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: Optional[str]
    inputs: List[str]
    seed: int
    version: str = __version__
    outputs: List[str] = field(default_factory=list)
    digest: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _output_files(out_dir: str) -> List[str]:
    names = []
    for root, _dirs, files in os.walk(out_dir):
        for name in files:
            rel = os.path.relpath(os.path.join(root, name), out_dir).replace(os.sep, "/")
            if rel == MANIFEST_NAME or os.path.basename(rel).startswith(".tmp_"):
                continue
            names.append(rel)
    return sorted(names)


def digest_outputs(out_dir: str) -> Dict[str, object]:
    """``{"outputs": [...], "digest": hex}`` for the files under *out_dir*."""
    if not os.path.isdir(out_dir):
        raise InputError(f"{out_dir}: not a directory")
    sha = hashlib.sha256()
    names = _output_files(out_dir)
    for rel in names:
        sha.update(rel.encode("utf-8") + b"\0")
        with open(os.path.join(out_dir, rel), "rb") as fh:
            sha.update(fh.read())
        sha.update(b"\0")
    return {"outputs": names, "digest": sha.hexdigest()}


def build_manifest(
    out_dir: str,
    command: str,
    config_path: Optional[str],
    inputs: Sequence[str],
    seed: int,
) -> RunManifest:
    summary = digest_outputs(out_dir)
    manifest = RunManifest(
        command=command,
        config_path=config_path,
        inputs=[str(p) for p in inputs],
        seed=seed,
        outputs=summary["outputs"],
        digest=summary["digest"],
    )
    logger.debug("manifest for %s: %d files, digest %s", command, len(manifest.outputs), manifest.digest)
    return manifest


def verify_manifest(path: str) -> Dict[str, object]:
    """Recompute the digest of the manifest's directory and compare."""
    try:
        with open(path, encoding="utf-8") as fh:
            recorded = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: cannot read manifest: {exc}") from None
    if "digest" not in recorded:
        raise InputError(f"{path}: manifest has no digest")
    current = digest_outputs(os.path.dirname(os.path.abspath(path)))
    return {
        "manifest": path,
        "recorded_digest": recorded["digest"],
        "current_digest": current["digest"],
        "match": recorded["digest"] == current["digest"],
    }
