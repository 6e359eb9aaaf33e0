import numpy as np
from riscfmimo import ScenarioConfig, baseline_cf, rate_report

# ======================================
# Rates of one deployment, with and without surfaces
cfg = ScenarioConfig(area_side_km=1.0, ap_count=60, user_count=20, ris_count=30, elements_per_ris=20,
                     ris_fixed_loss='cascade-once', power_policy='fractional', master_seed=3)


if __name__ == '__main__':
    report = rate_report(cfg, mc_draws=2000)
    baseline = baseline_cf(cfg)

    print('tau_c = {}, prelog = {:.4f}'.format(cfg.tau_c, cfg.prelog))
    for k, (r_cf, r_mc, r_base) in enumerate(zip(report.closed_form, report.mc_rates, baseline.closed_form)):
        print('user {:>2}: closed form {:.3f}  Monte-Carlo {:.3f}  no surfaces {:.3f}'.format(k, r_cf, r_mc, r_base))

    print('sum rate {:.3f} vs {:.3f} bit/s/Hz without surfaces'.format(report.sum_rate, baseline.sum_rate))
    print('mean throughput {:.2f} Mbit/s'.format(np.mean(report.throughputs) / 1e6))
