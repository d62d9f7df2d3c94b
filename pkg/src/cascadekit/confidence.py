"""Per-instance confidence scores deciding output-vs-escalate at each stage.

All four policies map an instance (at a given cascade stage) to a scalar:

* maxprob   -- largest softmax probability, range [1/|Y|, 1]
* dtu       -- L2 distance of the distribution to uniform, range
               [0, sqrt((|Y|-1)/|Y|)]
* random    -- keyed pseudo-random draw in [0, 1), a baseline
* heuristic -- input-length proxy in [0, 1], a baseline

Every function here is pure and deterministic; the random policy derives its
value from (seed, instance_id, stage) alone.
"""

from __future__ import annotations

import hashlib
import math
from enum import Enum
from typing import Sequence

from .errors import InvalidDistributionError, NonPositiveLengthError
from .records import InstanceRecord, PredictionRecord


class Policy(str, Enum):
    MAXPROB = "maxprob"
    DTU = "dtu"
    RANDOM = "random"
    HEURISTIC = "heuristic"


def policy_range(policy: Policy, label_count: int) -> tuple[float, float]:
    """Inclusive (minimum, maximum) confidence achievable under a policy."""
    if policy is Policy.MAXPROB:
        return (1.0 / label_count, 1.0)
    if policy is Policy.DTU:
        return (0.0, math.sqrt((label_count - 1) / label_count))
    return (0.0, 1.0)


def max_prob(distribution: Sequence[float]) -> float:
    """Largest entry of a probability distribution."""
    if not distribution:
        raise InvalidDistributionError("empty distribution")
    return max(distribution)


def dtu(distribution: Sequence[float]) -> float:
    """Euclidean distance between a distribution and the uniform one.

    Zero exactly when the distribution is uniform; grows as probability mass
    concentrates.
    """
    if not distribution:
        raise InvalidDistributionError("empty distribution")
    u = 1.0 / len(distribution)
    return math.sqrt(math.fsum((p - u) ** 2 for p in distribution))


def random_conf(seed: int, instance_id: str, stage: int) -> float:
    """Deterministic pseudo-random confidence in [0, 1).

    Keyed by (seed, instance_id, stage) so different stages make independent
    escalation decisions while whole runs stay reproducible across platforms.
    """
    key = f"{seed}:{instance_id}:{stage}".encode()
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def heuristic_conf(
    input_length: int, max_length: int, invert: bool = False
) -> float:
    """Input-length confidence proxy, clamped to [0, 1].

    Default direction treats shorter inputs as easier (higher confidence):
    1 - length/max_length. With ``invert`` the direction flips to
    length/max_length.
    """
    if input_length < 1 or max_length < 1:
        raise NonPositiveLengthError(
            f"lengths must be >= 1, got ({input_length}, {max_length})"
        )
    ratio = input_length / max_length
    value = ratio if invert else 1.0 - ratio
    return min(1.0, max(0.0, value))


def stage_confidence(
    policy: Policy,
    record: PredictionRecord,
    instance: InstanceRecord,
    stage: int,
    *,
    seed: int = 0,
    max_length: int = 1,
    heuristic_invert: bool = False,
) -> float:
    """Confidence of one model's prediction for one instance at stage ``stage``.

    ``stage`` is 1-based (the position of the model in the cascade order).
    """
    if policy is Policy.MAXPROB:
        return max_prob(record.distribution)
    if policy is Policy.DTU:
        return dtu(record.distribution)
    if policy is Policy.RANDOM:
        return random_conf(seed, instance.instance_id, stage)
    return heuristic_conf(
        instance.input_length, max_length, invert=heuristic_invert
    )
