"""Walkthrough: Monte Carlo verification of the convergence rates.

Runs the simulation harness on a small grid and prints the fitted log-log
slopes: the sup-deviation of the averaged two-step process from the error
order statistics and the slope-estimate error both shrink roughly like
n**-0.5.
"""

import quantfunc as qf

config = qf.SimulationConfig(
    n_grid=(100, 400, 1600),
    p=1,
    beta0=1.0,
    beta=(2.0,),
    error_dist=qf.ErrorDistribution("standard_normal"),
    design="equispaced",
    lam=0.5,
    replications=50,        # bump to 200+ for smoother slopes
    seed=42,
)

print("two-step process: sup-deviation from the error order statistics")
for rep in qf.rate_study_two_step(config):
    print(f"  {rep.metric}")
    for n, rmse, cov in zip(rep.n_grid, rep.rmse, rep.coverage):
        print(f"    n={n:5d}  rmse={rmse:.4f}  coverage={cov:.2f}")
    print(f"    fitted log-log slope: {rep.fitted_slope:.3f}")

print("\nrank-based slope estimate: error norm")
rep = qf.rate_study_r_estimator(config)
for n, rmse in zip(rep.n_grid, rep.rmse):
    print(f"    n={n:5d}  rmse={rmse:.4f}")
print(f"    fitted log-log slope: {rep.fitted_slope:.3f}")

print("\nCVaR(0.9) of the centered process vs the analytic normal value")
rep = qf.functional_consistency_study(config, "cvar", 0.9)
for n, rmse, me in zip(rep.n_grid, rep.rmse, rep.mean_error):
    print(f"    n={n:5d}  rmse={rmse:.4f}  mean error={me:+.4f}")
print(f"    fitted log-log slope: {rep.fitted_slope:.3f}")
