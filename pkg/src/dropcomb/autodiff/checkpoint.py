"""Checkpoint persistence: a JSON manifest plus one float64 blob per parameter."""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import CheckpointError
from ..utils.logger import logger
from .params import ParamStore

FORMAT_VERSION = 1
MANIFEST_NAME = 'manifest.json'
BLOB_DTYPE = '<f8'


def _blob_name(name: str) -> str:
    return name.replace('/', '_') + '.bin'


def save_params(store: ParamStore, directory: Path,
                metadata: Optional[Dict[str, Any]] = None) -> Path:
    """Write ``store`` under ``directory``; returns the manifest path.

    Values are written little-endian float64, so a save/load cycle is
    bit-exact.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, tensor in store:
        blob = _blob_name(name)
        (directory / blob).write_bytes(tensor.data.astype(BLOB_DTYPE).tobytes())
        entries.append({'name': name, 'shape': list(tensor.shape),
                        'dtype': 'float64', 'file': blob})
    manifest = {
        'version': FORMAT_VERSION,
        'params': entries,
        'frozen': sorted(store.frozen),
        'metadata': metadata or {},
    }
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2), encoding='utf-8')
    logger.debug(f"Saved {len(entries)} parameters to {directory}")
    return path


def load_params(directory: Path) -> Tuple[ParamStore, Dict[str, Any]]:
    """Read a checkpoint written by ``save_params``.

    Returns:
        The restored store (fresh optimizer state) and the saved metadata

    Raises:
        CheckpointError: If the manifest or a blob is missing or malformed
    """
    directory = Path(directory)
    path = directory / MANIFEST_NAME
    try:
        manifest = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as error:
        raise CheckpointError(f"No checkpoint manifest at {path}") from error
    except json.JSONDecodeError as error:
        raise CheckpointError(f"Corrupt checkpoint manifest {path}: {error}") from error
    if manifest.get('version') != FORMAT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint version {manifest.get('version')}")

    store = ParamStore()
    for entry in manifest['params']:
        shape = tuple(entry['shape'])
        blob_path = directory / entry['file']
        try:
            raw = blob_path.read_bytes()
        except FileNotFoundError as error:
            raise CheckpointError(f"Missing parameter blob {blob_path}") from error
        values = np.frombuffer(raw, dtype=BLOB_DTYPE)
        if values.size != int(np.prod(shape)):
            raise CheckpointError(
                f"Blob {blob_path} holds {values.size} values, expected shape {shape}"
            )
        store.add(entry['name'], values.astype(np.float64).reshape(shape))
    for name in manifest.get('frozen', []):
        store.freeze(name)
    return store, manifest.get('metadata', {})
