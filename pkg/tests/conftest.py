import random
import sys

from hypothesis import HealthCheck, settings, strategies as st

from formalvar.algebra import JetContext
from formalvar.samples import random_poly

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

rngs = st.integers(min_value=0, max_value=2**32 - 1).map(random.Random)


def poly(rng: random.Random, ctx: JetContext, max_theta: int = 2, order: int = 2, terms: int = 3):
    top = min(max_theta, ctx.odd_count * (order + 1))
    return random_poly(rng, ctx, rng.randint(0, top), order, terms)


def some_context(rng: random.Random, omega: bool = False, max_even: int = 2, max_odd: int = 2) -> JetContext:
    m = rng.randint(1, max_even)
    return JetContext.omega(m) if omega else JetContext(m, rng.randint(0, max_odd))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.REPORT):
        terminalreporter.write_line(module.REPORT[number])
