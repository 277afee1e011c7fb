import pytest

from iwatower import ModulePresentation, Prime, PrecisionContext, SeriesElement


@pytest.fixture(scope="session")
def p3():
    return Prime(3)


@pytest.fixture(scope="session")
def ctx3(p3):
    """Standard one-variable context: p = 3, N = 12, D = 30."""
    return PrecisionContext(p3, 12, 1, 30)


@pytest.fixture(scope="session")
def ctx3_d2(p3):
    return PrecisionContext(p3, 8, 2, 30)


def poly(ctx, coeffs):
    """Univariate element from a dense coefficient list."""
    return SeriesElement.univariate(ctx, coeffs)


def cyclic_module(ctx, coeffs):
    """Lambda_1 / (f) for f given by a dense coefficient list."""
    return ModulePresentation(ctx, 1, ((poly(ctx, coeffs),),))


def split_module(ctx, mu, root_units):
    """Lambda_1 / (p^mu * prod (T - p*a)): its characteristic element is
    coprime to every level element, so tower data is exactly affine:
    log torsion = mu*p^n + lam*n + sum ord_p(p*a)."""
    p = ctx.p.p
    f = SeriesElement.constant(ctx, p ** mu)
    for a in root_units:
        f = f * poly(ctx, [-p * a, 1])
    return ModulePresentation(ctx, 1, ((f,),))
