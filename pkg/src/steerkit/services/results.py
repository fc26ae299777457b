"""Result files with embedded run manifests, plus campaign checkpoints."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from steerkit import __version__
from steerkit.config import current_config
from steerkit.exceptions import DomainError, VerificationError
from steerkit.serialization import canonical_json, read_json, validate

logger = logging.getLogger(__name__)


def checksum(payload: dict) -> str:
    return hashlib.sha256(canonical_json(payload).encode('utf-8')).hexdigest()


@dataclass
class RunManifest:
    """Provenance of one output file. Timestamps and timings live only here."""

    command: str
    parameters: dict[str, Any]
    seed: int | None = None
    version: str = __version__
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    duration_s: float | None = None
    checksums: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {**asdict(self), 'format': 'manifest'}


class ResultStore:
    """Writes validated JSON documents under a base directory."""

    def __init__(self, base_path: str | Path | None = None):
        self.base_path = Path(base_path or current_config().RESULTS_PATH)
        self.checkpoint_path = self.base_path / 'checkpoints'

        logger.debug("Initialized result store", extra={'path': str(self.base_path)})

    def resolve(self, target: str | Path) -> Path:
        """Absolute paths are kept; relative ones land under the base directory."""
        path = Path(target)
        return path if path.is_absolute() or path.parent != Path('.') else self.base_path / path

    def write(self, target: str | Path, payload: dict, manifest: RunManifest) -> Path:
        """Validate ``payload``, stamp its checksum into the manifest and write both atomically."""
        validate(payload)
        manifest.checksums['payload'] = checksum(payload)
        document = {'manifest': validate(manifest.to_dict(), 'manifest'), 'payload': payload}

        path = self.resolve(target)
        _atomic_write(path, canonical_json(document))
        logger.info("Result written", extra={'path': str(path), 'status': payload.get('format')})
        return path

    def read(self, target: str | Path) -> tuple[dict, dict]:
        """Return (manifest, payload), verifying the payload checksum."""
        path = self.resolve(target)
        try:
            document = json.loads(path.read_text())
        except FileNotFoundError as e:
            raise DomainError(f"File not found: {path}") from e

        manifest, payload = document.get('manifest'), document.get('payload')
        if manifest is None or payload is None:
            raise DomainError(f"{path} has no embedded manifest")
        expected = manifest.get('checksums', {}).get('payload')
        if expected != checksum(payload):
            raise VerificationError(f"Checksum mismatch in {path}")
        return manifest, validate(payload)

    def save_checkpoint(self, name: str, payload: dict) -> Path:
        path = self.checkpoint_path / f'{name}.json'
        _atomic_write(path, canonical_json(validate(payload)))
        logger.debug("Checkpoint saved", extra={'path': str(path)})
        return path

    def load_checkpoint(self, name: str) -> dict | None:
        path = self.checkpoint_path / f'{name}.json'
        if not path.exists():
            return None
        logger.info("Resuming from checkpoint", extra={'path': str(path)})
        return read_json(path)

    def clear_checkpoint(self, name: str) -> bool:
        path = self.checkpoint_path / f'{name}.json'
        if path.exists():
            path.unlink()
            return True
        return False


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
