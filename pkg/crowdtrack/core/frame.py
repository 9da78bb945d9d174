from __future__ import annotations

from logging import getLogger
from pathlib import Path

import numpy as np

from crowdtrack.core.exceptions import EmptySequenceException, FrameFormatException, InvalidMaskException
from crowdtrack.tools.resources import package_name

LOGGER = getLogger(package_name())

PPM_MAGIC = b"P6"
PGM_MAGIC = b"P5"
PPM_MAXVAL = 255
N_CHANNELS = 3
WHITESPACE = b" \t\n\r\v\f"


class Frame:
    """
    One RGB 8-bit image of the sequence. Pixels are kept as a
    (height, width, 3) uint8 array, row-major with the origin
    in the top-left corner.
    """

    def __init__(self, pixels: np.ndarray) -> None:
        pixels = np.asarray(pixels)
        if pixels.ndim != 3 or pixels.shape[2] != N_CHANNELS:  # noqa: PLR2004
            msg = f"Frame pixels must have shape (height, width, 3), got {pixels.shape}."
            raise FrameFormatException(msg)

        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            msg = "Frame must be at least one pixel wide and high."
            raise FrameFormatException(msg)

        self.__pixels: np.ndarray = np.array(pixels, dtype=np.uint8)
        self.__pixels.setflags(write=False)

    @classmethod
    def filled(cls, width: int, height: int, color: tuple[int, int, int]) -> Frame:
        pixels = np.empty((height, width, N_CHANNELS), dtype=np.uint8)
        pixels[:, :] = color
        return cls(pixels)

    def width(self) -> int:
        return int(self.__pixels.shape[1])

    def height(self) -> int:
        return int(self.__pixels.shape[0])

    def shape(self) -> tuple[int, int]:
        return self.height(), self.width()

    def pixels(self) -> np.ndarray:
        return self.__pixels

    def channel(self, index: int) -> np.ndarray:
        return self.__pixels[:, :, index]

    def pixel(self, x: int, y: int) -> tuple[int, int, int]:
        r, g, b = self.__pixels[y, x]
        return int(r), int(g), int(b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return bool(np.array_equal(self.__pixels, other.pixels()))

    def __hash__(self) -> int:
        return hash((self.shape(), self.__pixels.tobytes()))

    def __repr__(self) -> str:
        return f"Frame(width={self.width()}, height={self.height()})"


class BinaryMask:
    """
    Foreground mask of a frame, a (height, width) boolean array.
    """

    def __init__(self, bits: np.ndarray) -> None:
        bits = np.asarray(bits)
        if bits.ndim != 2:  # noqa: PLR2004
            msg = f"Mask bits must have shape (height, width), got {bits.shape}."
            raise InvalidMaskException(msg)

        self.__bits: np.ndarray = np.array(bits, dtype=bool)
        self.__bits.setflags(write=False)

    @classmethod
    def empty(cls, width: int, height: int) -> BinaryMask:
        return cls(np.zeros((height, width), dtype=bool))

    def width(self) -> int:
        return int(self.__bits.shape[1])

    def height(self) -> int:
        return int(self.__bits.shape[0])

    def shape(self) -> tuple[int, int]:
        return self.height(), self.width()

    def bits(self) -> np.ndarray:
        return self.__bits

    def count(self) -> int:
        return int(np.count_nonzero(self.__bits))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return bool(np.array_equal(self.__bits, other.bits()))

    def __hash__(self) -> int:
        return hash((self.shape(), self.__bits.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMask(width={self.width()}, height={self.height()}, count={self.count()})"


def _skip_whitespace_and_comments(data: bytes, offset: int) -> int:
    while offset < len(data):
        if data[offset : offset + 1] == b"#":
            newline = data.find(b"\n", offset)
            offset = len(data) if newline == -1 else newline + 1
        elif data[offset] in WHITESPACE:
            offset += 1
        else:
            break
    return offset


def _read_header_int(data: bytes, offset: int, path: Path, name: str) -> tuple[int, int]:
    offset = _skip_whitespace_and_comments(data, offset)
    start = offset
    while offset < len(data) and data[offset : offset + 1].isdigit():
        offset += 1

    if start == offset:
        msg = f"{path}: malformed header, expected {name} at byte {start}."
        raise FrameFormatException(msg)

    return int(data[start:offset]), offset


def load_frame(path: str | Path) -> Frame:
    """
    Read a binary portable pixmap (P6, maxval 255). Pixel values
    are returned exactly as stored.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as e:
        msg = f"{path}: file not found at byte 0."
        raise FrameFormatException(msg) from e

    magic = data[:2]
    if magic == PGM_MAGIC:
        msg = f"{path}: P5 graymaps are not supported, expected P6 at byte 0."
        raise FrameFormatException(msg)
    if magic != PPM_MAGIC:
        msg = f"{path}: malformed header, expected P6 magic at byte 0."
        raise FrameFormatException(msg)

    width, offset = _read_header_int(data, 2, path, "width")
    height, offset = _read_header_int(data, offset, path, "height")
    maxval, offset = _read_header_int(data, offset, path, "maxval")

    if width < 1 or height < 1:
        msg = f"{path}: malformed header, invalid size {width}x{height} before byte {offset}."
        raise FrameFormatException(msg)

    if maxval != PPM_MAXVAL:
        msg = f"{path}: maxval {maxval} is not supported (expected 255) before byte {offset}."
        raise FrameFormatException(msg)

    if offset >= len(data) or data[offset] not in WHITESPACE:
        msg = f"{path}: malformed header, expected whitespace after maxval at byte {offset}."
        raise FrameFormatException(msg)
    offset += 1

    n_bytes = width * height * N_CHANNELS
    available = len(data) - offset
    if available < n_bytes:
        msg = (
            f"{path}: truncated pixel data at byte {len(data)}, "
            f"expected {n_bytes} bytes starting at byte {offset} but found {available}."
        )
        raise FrameFormatException(msg)

    if available > n_bytes:
        LOGGER.debug("%s: ignoring %d trailing bytes", path, available - n_bytes)

    pixels = np.frombuffer(data, dtype=np.uint8, count=n_bytes, offset=offset)
    return Frame(pixels.reshape(height, width, N_CHANNELS))


def _write_ppm(pixels: np.ndarray, path: Path) -> None:
    height, width = pixels.shape[:2]
    header = f"P6\n{width} {height}\n{PPM_MAXVAL}\n".encode("ascii")
    with path.open("wb") as file:
        file.write(header)
        file.write(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())


def save_frame(frame: Frame, path: str | Path) -> None:
    _write_ppm(frame.pixels(), Path(path))


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    """Write a mask as a P6 pixmap, foreground white and background black."""
    pixels = np.zeros((mask.height(), mask.width(), N_CHANNELS), dtype=np.uint8)
    pixels[mask.bits()] = PPM_MAXVAL
    _write_ppm(pixels, Path(path))


def list_frame_sequence(directory: str | Path, pattern: str = "*.ppm") -> list[Path]:
    """
    Sorted file names matching ``pattern``. The position in the
    list is the frame time t.
    """
    directory = Path(directory)
    if not directory.is_dir():
        msg = f"{directory}: input directory does not exist."
        raise EmptySequenceException(msg)

    paths = sorted((path for path in directory.glob(pattern) if path.is_file()), key=lambda p: p.name)

    if not paths:
        msg = f"{directory}: no files match {pattern!r}."
        raise EmptySequenceException(msg)

    LOGGER.info("Found %d frames in %s", len(paths), directory)
    return paths
