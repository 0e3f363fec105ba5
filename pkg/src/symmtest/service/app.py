"""FastAPI service wrapping the symmetry-test library.

Spectral constants (largest eigenvalues, curve suprema) are cached across
requests, so repeated slope queries against the same null price the expensive
discretized eigenproblem only once per process.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import efficiency, simulation, spectral, statistics
from ..distributions import alternative_family, null_distribution
from ..rng import substream
from .schemas import (
    CurveRequest,
    CurveResponse,
    EigenRequest,
    EigenResponse,
    LimitNullRequest,
    LimitNullResponse,
    PowerRequest,
    PowerResponse,
    SlopeCell,
    SlopeRequest,
    SlopeResponse,
    TestRequest,
    TestResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="symmtest",
        description="Characterization-based symmetry tests: statistics, limit-law "
        "spectra, efficiency indices, and bootstrap power studies.",
        version="0.1.0",
    )

    def fail(exc: Exception):
        raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/test", response_model=TestResponse)
    def run_test(req: TestRequest):
        try:
            report = statistics.test_report(
                req.values, req.statistic, B=req.b_resamples, seed=req.seed
            )
        except ValueError as exc:
            fail(exc)
        return TestResponse(
            statistic=report.statistic_name,
            value=report.statistic_value,
            scaled_value=report.scaled_value,
            p_value=report.p_value,
            n=report.n,
            B=report.resamples_B,
            seed=report.seed,
        )

    @app.post("/eigen", response_model=EigenResponse)
    def run_eigen(req: EigenRequest):
        dist = null_distribution(req.dist)
        if req.truncation_A is not None:
            dist = dist.with_truncation(req.truncation_A)
        try:
            op = spectral.build_discrete_operator(dist, "J", req.m)
            nu1 = spectral.largest_abs_eigenvalue(op)
            roots = spectral.solve_uniform_eigenvalues(req.k) if req.dist == "uniform" else None
        except (spectral.SpectralDomainError, ValueError) as exc:
            fail(exc)
        return EigenResponse(
            dist=req.dist,
            m=req.m,
            truncation_A=dist.truncation_A,
            nystrom_nu1=nu1,
            closed_form_roots=roots,
        )

    @app.post("/curve", response_model=CurveResponse)
    def run_curve(req: CurveRequest):
        dist = null_distribution(req.dist)
        try:
            curve = spectral.nu1_curve(dist, req.m_coarse, req.m_fine, req.grid_size)
        except (spectral.SpectralDomainError, ValueError) as exc:
            fail(exc)
        return CurveResponse(
            dist=req.dist,
            m_coarse=req.m_coarse,
            m_fine=req.m_fine,
            t=curve.t_grid.tolist(),
            nu1=curve.nu1_values.tolist(),
            argmax_t=curve.argmax_t,
            sup_value=curve.sup_value,
        )

    @app.post("/slope", response_model=SlopeResponse)
    def run_slope(req: SlopeRequest):
        dist = null_distribution(req.dist)
        try:
            family = alternative_family(req.alt, dist, req.beta)
            nu1 = spectral.reference_nu1(req.dist, req.eigen_m)
            kappa0, _ = spectral.reference_kappa0(
                req.dist, req.curve_m_coarse, req.curve_m_fine, req.curve_grid_size
            )
            jn = efficiency.slope_jn(dist, family, nu1)
            kn = efficiency.slope_kn(dist, family, kappa0)
        except (spectral.SpectralDomainError, efficiency.QuadratureError, ValueError) as exc:
            fail(exc)
        return SlopeResponse(
            dist=req.dist,
            alt=req.alt,
            beta=req.beta,
            nu1=nu1,
            kappa0=kappa0,
            jn=SlopeCell(
                statistic="jn",
                index=jn.index,
                b_coefficient=jn.b_coefficient,
                tail_constant=jn.tail_constant,
            ),
            kn=SlopeCell(
                statistic="kn",
                index=kn.index,
                b_coefficient=kn.b_coefficient,
                tail_constant=kn.tail_constant,
                argmax_t=kn.argmax_t,
            ),
        )

    @app.post("/power", response_model=PowerResponse)
    def run_power(req: PowerRequest):
        try:
            config = simulation.PowerStudyConfig(
                null_dist=req.null,
                alternative=req.alt,
                beta=req.beta,
                theta_values=tuple(req.thetas),
                n=req.n,
                N=req.N,
                level=req.level,
                statistics=tuple(req.stats),
                seed=req.seed,
                orientation=req.orientation,
            )
            if set(config.statistics) <= {"ks", "sign"}:
                report = simulation.classical_power(config)
            else:
                report = simulation.warp_speed_power(config)
        except ValueError as exc:
            fail(exc)
        return PowerResponse(**report.to_dict())

    @app.post("/limit-null", response_model=LimitNullResponse)
    def run_limit_null(req: LimitNullRequest):
        dist = null_distribution(req.dist)
        try:
            eigs = spectral.limit_eigenvalues(dist, req.k_eigen, req.nystrom_m)
            draws = spectral.sample_limit_null_jn(
                dist, req.k_eigen, req.draws, substream(req.seed, 0), eigenvalues=eigs
            )
        except (spectral.SpectralDomainError, ValueError) as exc:
            fail(exc)
        return LimitNullResponse(
            dist=req.dist,
            k_eigen=req.k_eigen,
            seed=req.seed,
            eigenvalues=eigs.tolist(),
            values=draws.tolist(),
        )

    return app


app = create_app()
