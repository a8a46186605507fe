"""Sink-side frequency band management: equal-width partitioning, lowest-first
allotment, and half-range withdrawal from the slowest cluster."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import BadChannel, DuplicateRequest, NoFreeRange, NothingToWithdraw

Interval = tuple[float, float]  # half-open [start, end), hertz


@dataclass(frozen=True)
class FrequencyPlan:
    band: Interval
    ranges: dict[int, Interval]
    free_pool: tuple[Interval, ...]
    channels_per_range: int


def partition_band(band: Interval, K: int, channels_per_range: int = 1) -> FrequencyPlan:
    """Split the band into K contiguous equal-width free ranges, low to high."""
    f_low, f_high = band
    width = (f_high - f_low) / K
    pool = tuple(
        (f_low + i * width, f_high if i == K - 1 else f_low + (i + 1) * width)
        for i in range(K)
    )
    return FrequencyPlan(
        band=band, ranges={}, free_pool=pool, channels_per_range=channels_per_range
    )


def request_allotment(plan: FrequencyPlan, cluster_id: int) -> FrequencyPlan:
    """Assign the lowest free range to the requesting cluster."""
    if cluster_id in plan.ranges:
        raise DuplicateRequest(cluster_id)
    if not plan.free_pool:
        raise NoFreeRange(f"no free range left for cluster {cluster_id}")
    pool = sorted(plan.free_pool)
    granted, rest = pool[0], tuple(pool[1:])
    ranges = dict(plan.ranges)
    ranges[cluster_id] = granted
    return FrequencyPlan(
        band=plan.band,
        ranges=ranges,
        free_pool=rest,
        channels_per_range=plan.channels_per_range,
    )


def withdraw_half(
    plan: FrequencyPlan, new_cluster: int, data_rates: Mapping[int, float]
) -> FrequencyPlan:
    """Take the upper half of the lowest-data-rate cluster's range and hand it
    to the new cluster. Ties on rate go to the lowest cluster id."""
    if new_cluster in plan.ranges:
        raise DuplicateRequest(new_cluster)
    if not plan.ranges:
        raise NothingToWithdraw("no allocated cluster to withdraw from")
    donor = min(plan.ranges, key=lambda c: (data_rates.get(c, 0.0), c))
    a, b = plan.ranges[donor]
    mid = a + (b - a) / 2.0
    ranges = dict(plan.ranges)
    ranges[donor] = (a, mid)
    ranges[new_cluster] = (mid, b)
    return FrequencyPlan(
        band=plan.band,
        ranges=ranges,
        free_pool=plan.free_pool,
        channels_per_range=plan.channels_per_range,
    )


def channel_frequency(plan: FrequencyPlan, cluster_id: int, channel_index: int) -> Interval:
    """channel_index-th of the C equal subdivisions of the cluster's range."""
    if cluster_id not in plan.ranges:
        raise NoFreeRange(f"cluster {cluster_id} holds no range")
    c = plan.channels_per_range
    if not (0 <= channel_index < c):
        raise BadChannel(channel_index, c)
    start, end = plan.ranges[cluster_id]
    step = (end - start) / c
    lo = start + channel_index * step
    hi = end if channel_index == c - 1 else start + (channel_index + 1) * step
    return (lo, hi)
