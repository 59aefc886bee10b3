"""Grid evaluation of the analytic models, emitted as CSV tables."""

from __future__ import annotations

from dataclasses import dataclass

from .analytic import (
    MIDNIGHT_LAMBDA,
    MORNING_LAMBDA,
    REFERENCE_WAIT_TIMES,
    ModelParams,
    average_delay,
    delay_one_dir_beta,
    delay_two_dir_numeric,
    pdr_one_dir,
    pdr_two_dir,
)
from .overhead import PUBLISHED_INPUTS, nro_total
from .quadrature import NumericError
from .tables import write_csv

__all__ = ["CurveGrid", "CurveError", "model_curves", "curve_rows", "CURVE_COLUMNS"]

ROADS = ("one", "two")
NRO_PROTOCOLS = ("dymo", "dsr", "dsdv")

CURVE_COLUMNS = {
    "pdr": ("lambda", "sigma", "wait_t", "road", "pdr"),
    "delay": ("lambda", "sigma", "wait_t", "road", "tau0", "delay"),
    "nro": ("population", "lambda", "h", "t", *NRO_PROTOCOLS),
}


class CurveError(ArithmeticError):
    """A grid point failed to evaluate; ``point`` names it."""

    def __init__(self, kind, point, cause):
        super().__init__(f"{kind} model failed at {point}: {cause}")
        self.point = point


@dataclass(frozen=True)
class CurveGrid:
    lambdas: tuple = (MIDNIGHT_LAMBDA, MORNING_LAMBDA)
    sigmas: tuple = (3.0,)
    wait_times: tuple = REFERENCE_WAIT_TIMES
    roads: tuple = ROADS
    # nro only
    populations: tuple = (10, 70)
    periods: tuple = tuple(range(0, 901, 60))
    hops: tuple | None = None  # None: each population's published pair
    lambda_override: bool = False


def _pdr(p, road):
    return pdr_one_dir(p) if road == "one" else pdr_two_dir(p)


def _tau(p, road):
    return delay_one_dir_beta(p) if road == "one" else delay_two_dir_numeric(p)


def curve_rows(kind: str, grid: CurveGrid = CurveGrid()) -> list[list]:
    if kind not in CURVE_COLUMNS:
        raise ValueError(f"unknown curve kind {kind!r}")
    rows = []
    if kind == "nro":
        for pop in grid.populations:
            inputs = PUBLISHED_INPUTS[pop]
            lams = grid.lambdas if grid.lambda_override else (inputs.lam,)
            for lam in lams:
                for h in grid.hops or inputs.hops:
                    for t in grid.periods:
                        point = dict(population=pop, lam=lam, h=h, t=t)
                        try:
                            vals = [nro_total(pr, inputs.params(pr, h, t, lam=lam))
                                    for pr in NRO_PROTOCOLS]
                        except (ValueError, OverflowError, ArithmeticError) as exc:
                            raise CurveError(kind, point, exc) from exc
                        rows.append([pop, float(lam), h, t, *vals])
        return rows
    for lam in grid.lambdas:
        for sigma in grid.sigmas:
            for road in grid.roads:
                for wait in grid.wait_times:
                    point = dict(lam=lam, sigma=sigma, wait_t=wait, road=road)
                    try:
                        p = ModelParams(lam=lam, sigma=sigma, wait_t=wait)
                        if kind == "pdr":
                            rows.append([float(lam), float(sigma), wait, road, _pdr(p, road)])
                        else:
                            tau = _tau(p, road)
                            rows.append([float(lam), float(sigma), wait, road, tau,
                                         average_delay(tau, p)])
                    except (NumericError, ValueError, OverflowError) as exc:
                        raise CurveError(kind, point, exc) from exc
    return rows


def model_curves(kind: str, grid: CurveGrid = CurveGrid()) -> str:
    return write_csv(CURVE_COLUMNS[kind], curve_rows(kind, grid))
