"""
HCUBE container: a sequence of little-endian float64 records.

Each record is a fixed header (magic b"HCUB", uint16 version, uint8 dtype code,
uint8 reserved, uint32 H, W, C, uint16 name length), the UTF-8 name, and
8*H*W*C payload bytes in row-major H x W x C order.
"""

import logging
import struct
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from utils.exceptions import HcubeFormatError

from .hsi_cube import HsiCube

logger = logging.getLogger(__name__)

MAGIC = b"HCUB"
VERSION = 1
DTYPE_F64 = 1
HEADER = struct.Struct("<4sHBBIIIH")
WAVELENGTH_SUFFIX = ".wavelengths"


def payload_size(height: int, width: int, bands: int) -> int:
    """Bytes of float64 payload declared by a header"""
    return 8 * height * width * bands


def encode_record(data: np.ndarray, name: str) -> bytes:
    height, width, bands = data.shape
    encoded_name = name.encode("utf-8")
    header = HEADER.pack(
        MAGIC, VERSION, DTYPE_F64, 0, height, width, bands, len(encoded_name)
    )
    return header + encoded_name + np.ascontiguousarray(data, dtype="<f8").tobytes()


def write_hcube_records(records: Sequence[HsiCube], path: Union[str, Path]) -> Path:
    """Write every cube as one record; wavelengths follow as `<name>.wavelengths`"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chunks: List[bytes] = []
    for cube in records:
        chunks.append(encode_record(cube.data, cube.name))
        if cube.wavelengths is not None:
            wavelengths = cube.wavelengths.reshape(1, 1, -1)
            chunks.append(encode_record(wavelengths, cube.name + WAVELENGTH_SUFFIX))
    path.write_bytes(b"".join(chunks))
    logger.debug(f"Wrote {len(records)} HCUBE records to {path}")
    return path


def _decode(buffer: bytes, filename: str) -> List[HsiCube]:
    records: List[HsiCube] = []
    offset = 0

    def fail(message: str, field: str) -> HcubeFormatError:
        return HcubeFormatError(message, field=field, filename=filename)

    if not buffer:
        raise fail("file is empty", "header")
    while offset < len(buffer):
        if len(buffer) - offset < HEADER.size:
            raise fail("truncated header", "header")
        header = HEADER.unpack_from(buffer, offset)
        magic, version, dtype, _, height, width, bands, name_len = header
        if magic != MAGIC:
            raise fail(f"expected {MAGIC!r}, found {magic!r}", "magic")
        if version != VERSION:
            raise fail(f"unsupported version {version}", "version")
        if dtype != DTYPE_F64:
            raise fail(f"unsupported dtype code {dtype}", "dtype")
        dims = {"height": height, "width": width, "bands": bands}
        for field_name, value in dims.items():
            if value < 1:
                raise fail("must be >= 1", field_name)
        offset += HEADER.size

        if len(buffer) - offset < name_len:
            raise fail("truncated record name", "name")
        try:
            name = buffer[offset : offset + name_len].decode("utf-8")
        except UnicodeDecodeError:
            raise fail("record name is not UTF-8", "name")
        offset += name_len

        size = payload_size(height, width, bands)
        if len(buffer) - offset < size:
            available = len(buffer) - offset
            raise fail(f"declares {size} bytes, {available} available", "payload")
        count = height * width * bands
        values = np.frombuffer(buffer, dtype="<f8", count=count, offset=offset)
        offset += size
        data = values.astype(np.float64).reshape(height, width, bands)

        owner = records[-1] if records else None
        if owner is not None and name == owner.name + WAVELENGTH_SUFFIX:
            wavelengths = data.reshape(-1)
            records[-1] = HsiCube(owner.data, name=owner.name, wavelengths=wavelengths)
            continue
        if not np.isfinite(data).all():
            raise fail("payload holds non-finite values", "payload")
        records.append(HsiCube(data, name=name))
    return records


def read_hcube_records(path: Union[str, Path]) -> List[HsiCube]:
    """
    Parse every record of an HCUBE file.

    Raises:
        HcubeFormatError: Malformed or truncated file, naming the offending field
        FileNotFoundError: Missing file
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    records = _decode(path.read_bytes(), path.name)
    logger.debug(f"Read {len(records)} HCUBE records from {path}")
    return records


def write_hcube(cube: HsiCube, path: Union[str, Path]) -> Path:
    """Write a single cube (plus its wavelength record, if any)"""
    path = write_hcube_records([cube], path)
    logger.info(
        f"Wrote {cube.height}x{cube.width}x{cube.bands} cube '{cube.name}' to {path}"
    )
    return path


def read_hcube(path: Union[str, Path]) -> HsiCube:
    """
    Read a single-cube HCUBE file.

    Raises:
        HcubeFormatError: Malformed file or more than one cube record
    """
    records = read_hcube_records(path)
    if len(records) != 1:
        raise HcubeFormatError(
            f"expected one cube record, found {len(records)}",
            field="records",
            filename=Path(path).name,
        )
    cube = records[0]
    logger.info(
        f"Read {cube.height}x{cube.width}x{cube.bands} cube '{cube.name}' from {path}"
    )
    return cube
