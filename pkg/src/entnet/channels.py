"""ITU grid channel bookkeeping.

The network carries photon pairs whose wavelengths sit symmetrically around a
center channel (energy conservation at the source).  Channels are identified
by their 100 GHz ITU C-band grid number; the pair partner of channel ``c`` is
``2 * center - c``.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ChannelGrid:
    """The set of usable wavelength channels and their common center.

    ``channels`` excludes the center channel itself (that slot is degenerate:
    both photons of a pair would share it).
    """

    channels: tuple[int, ...]
    center: int = 34

    def __post_init__(self) -> None:
        if len(set(self.channels)) != len(self.channels):
            raise ValueError("duplicate channel in grid")
        if self.center in self.channels:
            raise ValueError("center channel cannot be an allocatable channel")
        for ch in self.channels:
            if self.mirror(ch) not in self.channels:
                raise ValueError(f"channel {ch} has no mirror partner in grid")

    def mirror(self, ch: int) -> int:
        return 2 * self.center - ch

    def __contains__(self, ch: int) -> bool:
        return ch in self.channels

    def spectral_distance(self, ch: int) -> int:
        return abs(ch - self.center)

    def pairs(self) -> list[tuple[int, int]]:
        """All (low, high) mirror pairs, innermost (closest to center) first."""
        lows = sorted((c for c in self.channels if c < self.center), reverse=True)
        return [(lo, self.mirror(lo)) for lo in lows]

    @property
    def pair_count(self) -> int:
        return len(self.channels) // 2


DEFAULT_GRID = ChannelGrid(channels=(30, 31, 32, 33, 35, 36, 37, 38), center=34)
