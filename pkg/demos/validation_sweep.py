from riscfmimo import SweepSpec, validation_sweep
from riscfmimo.presets import preset_mapping
from riscfmimo.scenario import build_scenario

# ======================================
# Closed form against Monte-Carlo with unit large-scale gains.
# Fewer channel draws than the preset so the demo runs in seconds.
base = build_scenario(dict(preset_mapping('validation'), channel_draws_per_topology=2000))


if __name__ == '__main__':
    table = validation_sweep(SweepSpec('M', [50, 100, 150, 200], base), threads=2)
    print('{:>5} {:>12} {:>12} {:>12}'.format('M', 'closed form', 'Monte-Carlo', 'oracle'))
    for row in table.rows:
        print('{:>5} {:>12.4f} {:>12.4f} {:>12.4f}'.format(row.value, row.closed_form, row.mc_rate, row.oracle))
