"""Shared test configuration: a fast, deterministic hypothesis profile."""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "varweights",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("varweights")
