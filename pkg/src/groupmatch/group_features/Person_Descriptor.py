"""Module containing person crops and the stripe histogram descriptor extracted from them."""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from skimage.color import rgb2gray, rgb2hsv, rgb2lab, rgb2ycbcr, rgb2yiq
from skimage.filters import gabor
from skimage.transform import resize
from skimage.util import img_as_float

from groupmatch.groupmatch_config.GroupMatch_Config import Feature_Config
from groupmatch.groupmatch_exceptions import Empty_Crop_Exception

CROP_HEIGHT = 128
CROP_WIDTH = 48

# (low, high) of every colour channel, in the order RGB, HSV, YCbCr, Lab, YIQ.
_Color_Channel_Ranges: list[tuple[float, float]] = [
    (0.0, 1.0), (0.0, 1.0), (0.0, 1.0),
    (0.0, 1.0), (0.0, 1.0), (0.0, 1.0),
    (16.0, 235.0), (16.0, 240.0), (16.0, 240.0),
    (0.0, 100.0), (-128.0, 127.0), (-128.0, 127.0),
    (0.0, 1.0), (-0.5957, 0.5957), (-0.5226, 0.5226),
]


class Box_Kind(Enum):
    """Enumeration of the annotation boxes a manifest can provide for a person."""
    Head = "head"
    Body = "body"

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)


@dataclass(frozen=True)
class Person_Crop:
    """The resized RGB raster of one person and the centre of that person in the group image."""
    pixels: np.ndarray
    center: tuple[float, float]
    index: int

    @staticmethod
    def from_pixels(pixels: np.ndarray, center: tuple[float, float], index: int):
        """
        :param pixels: RGB raster of any size.
        :param center: Centre of the person in group image coordinates.
        :param index: Ordinal of the person within the group.
        :return: A crop resized to 128x48 with values in [0, 1].
        """
        if pixels.size == 0:
            raise Empty_Crop_Exception(tuple(pixels.shape))
        rgb = img_as_float(pixels)
        if rgb.ndim == 2:
            rgb = np.stack([rgb, rgb, rgb], axis=-1)
        rgb = rgb[..., :3]
        if rgb.shape[:2] != (CROP_HEIGHT, CROP_WIDTH):
            rgb = resize(rgb, (CROP_HEIGHT, CROP_WIDTH), anti_aliasing=True)
        return Person_Crop(np.clip(rgb, 0.0, 1.0), (float(center[0]), float(center[1])), index)

    @staticmethod
    def from_group_image(image: np.ndarray, box: tuple[float, float, float, float], index: int,
                         kind: Box_Kind = Box_Kind.Body, config: Feature_Config | None = None):
        """
        Cut a person out of a group image. Head boxes are expanded to a body box below the head.
        :param image: The group image as an (H, W, 3) array.
        :param box: The annotation box (x, y, w, h) in pixels.
        :param index: Ordinal of the person within the group.
        :param kind: Whether the box marks the head or the whole body.
        :param config: Feature configuration holding the head expansion ratios.
        :return: The person crop.
        """
        body = body_box(box, (image.shape[1], image.shape[0]), kind, config)
        x, y, w, h = body
        x0, y0 = int(round(x)), int(round(y))
        x1, y1 = int(round(x + w)), int(round(y + h))
        pixels = image[y0:y1, x0:x1]
        return Person_Crop.from_pixels(pixels, (x + w / 2.0, y + h / 2.0), index)


def body_box(box: tuple[float, float, float, float], image_size: tuple[int, int], kind: Box_Kind = Box_Kind.Body,
             config: Feature_Config | None = None) -> tuple[float, float, float, float]:
    """
    :param box: The annotation box (x, y, w, h).
    :param image_size: The (width, height) of the group image.
    :param kind: Whether the box marks the head or the whole body.
    :param config: Feature configuration holding the head expansion ratios.
    :return: The body box clamped to the image bounds.
    """
    if config is None:
        config = Feature_Config()
    x, y, w, h = (float(v) for v in box)
    if kind is Box_Kind.Head:
        head_center_x = x + w / 2.0
        w, h = w * config.head_width_ratio, h * config.head_height_ratio
        x = head_center_x - w / 2.0
    width, height = image_size
    x0, y0 = min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height))
    x1, y1 = min(max(x + w, 0.0), float(width)), min(max(y + h, 0.0), float(height))
    return x0, y0, x1 - x0, y1 - y0


@dataclass(frozen=True)
class Person_Descriptor:
    """Concatenated per-stripe, per-channel, L1-normalized histograms of one person."""
    values: np.ndarray
    bins: int = 16

    @property
    def dimension(self) -> int:
        """
        :return: Length of the descriptor vector.
        """
        return int(self.values.shape[0])

    @property
    def blocks(self) -> np.ndarray:
        """
        :return: The descriptor reshaped to one histogram per row.
        """
        return self.values.reshape(-1, self.bins)

    def distance(self, other) -> float:
        """
        :param other: Another descriptor of the same dimension.
        :return: Euclidean distance between the two descriptors.
        """
        return float(np.linalg.norm(self.values - other.values))

    def __len__(self) -> int:
        return self.dimension


def descriptor_dimension(config: Feature_Config | None = None) -> int:
    """
    :param config: Feature configuration.
    :return: stripes x channels x bins, where channels are 15 colour channels plus the Gabor filters.
    """
    if config is None:
        config = Feature_Config()
    channels = len(_Color_Channel_Ranges) + len(config.gabor_frequencies) * config.gabor_orientations
    return config.stripes * channels * config.bins


def _color_channels(rgb: np.ndarray) -> list[np.ndarray]:
    spaces = [rgb, rgb2hsv(rgb), rgb2ycbcr(rgb), rgb2lab(rgb), rgb2yiq(rgb)]
    channels = []
    for space in spaces:
        channels.extend(space[..., c] for c in range(3))
    normalized = []
    for channel, (low, high) in zip(channels, _Color_Channel_Ranges):
        normalized.append(np.clip((channel - low) / (high - low), 0.0, 1.0))
    return normalized


def _gabor_channels(rgb: np.ndarray, config: Feature_Config) -> list[np.ndarray]:
    gray = rgb2gray(rgb)
    channels = []
    for frequency in config.gabor_frequencies:
        for o in range(config.gabor_orientations):
            real, imaginary = gabor(gray, frequency=frequency, theta=np.pi * o / config.gabor_orientations, mode='reflect')
            magnitude = np.hypot(real, imaginary)
            peak = float(magnitude.max())
            channels.append(magnitude / peak if peak > 0 else np.zeros_like(magnitude))
    return channels


def extract_person_descriptor(crop: Person_Crop, config: Feature_Config | None = None) -> Person_Descriptor:
    """
    Partition the crop into horizontal stripes and histogram every colour and Gabor channel of every stripe.
    :param crop: The person crop, resized to 128x48.
    :param config: Feature configuration.
    :return: The descriptor; every block of `bins` values sums to 1.
    """
    if config is None:
        config = Feature_Config()
    if crop.pixels.size == 0:
        raise Empty_Crop_Exception(tuple(crop.pixels.shape))
    rgb = crop.pixels
    if rgb.shape[:2] != (CROP_HEIGHT, CROP_WIDTH):
        rgb = Person_Crop.from_pixels(rgb, crop.center, crop.index).pixels
    channels = _color_channels(rgb) + _gabor_channels(rgb, config)
    stripe_rows = np.array_split(np.arange(rgb.shape[0]), config.stripes)
    histograms = []
    for rows in stripe_rows:
        for channel in channels:
            counts, _ = np.histogram(channel[rows], bins=config.bins, range=(0.0, 1.0))
            histograms.append(counts / counts.sum())
    return Person_Descriptor(np.concatenate(histograms).astype(np.float64), config.bins)


def mean_descriptor(descriptors: list[Person_Descriptor]) -> Person_Descriptor:
    """
    :param descriptors: Non-empty list of descriptors of equal dimension.
    :return: Their average, which is still block-wise L1 normalized.
    """
    assert len(descriptors) > 0, "Cannot average an empty list of descriptors"
    return Person_Descriptor(np.mean([d.values for d in descriptors], axis=0), descriptors[0].bins)
