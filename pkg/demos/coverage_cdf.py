import csv
from riscfmimo import compare_outage
from riscfmimo.presets import preset_mapping
from riscfmimo.scenario import build_scenario

# ======================================
# Min-rate CDF with and without surfaces, dumped as plot-ready columns
cfg = build_scenario(dict(preset_mapping('coverage-dense'), topology_draws=200))


def dump_curves(comparison, path):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['curve', 'min_rate', 'cdf'])
        for label, result in (('ris', comparison.ris), ('baseline', comparison.baseline)):
            for value, level in result.cdf.rows():
                writer.writerow([label, value, level])


if __name__ == '__main__':
    comparison = compare_outage(cfg, 'min-rate', threads=4)
    for p in (0.05, 0.2):
        print('{:.0%} outage: {:.4f} vs {:.4f} without surfaces (x{:.2f})'.format(
            p, comparison.ris.quantiles[p], comparison.baseline.quantiles[p], comparison.ratio(p)))
    dump_curves(comparison, 'min_rate_cdf.csv')
