"""
Writes experiment results as CSV tables or JSON documents.

Every file starts with the metadata of its run (tool version, config hash, master
seed, tau_c...), as ``# key: value`` comment lines in CSV or a ``metadata`` object in
JSON. Nothing time-dependent is written, so reruns are byte-identical.
"""

import csv
import json
import logging
import os

import numpy as np


logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')
OUT_ENV_VAR = 'RISCFMIMO_OUT'


def default_out_dir():
    return os.environ.get(OUT_ENV_VAR, os.getcwd())


def output_path(out_dir, experiment, metadata, fmt):
    """ ``<out_dir>/<experiment>_<confighash>.<fmt>`` """
    if fmt not in FORMATS:
        raise ValueError('Unknown output format {!r}'.format(fmt))
    return os.path.join(out_dir, '{}_{}.{}'.format(experiment, metadata['config_hash'], fmt))


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _plain(value):
    """ Converts numpy scalars/arrays (possibly nested) into JSON-friendly values. """
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_csv(path, header, rows, metadata):
    with open(path, 'w', newline='') as f:
        for key in sorted(metadata):
            f.write('# {}: {}\n'.format(key, _plain(metadata[key])))
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_json(path, payload, metadata):
    document = dict(_plain(payload))
    document['metadata'] = _plain(metadata)
    with open(path, 'w') as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write('\n')


def rate_header():
    return ('user_id', 'R_closed', 'R_mc', 'R_mc_stderr', 'S_k')


def write_result(result, experiment, out_dir, fmt):
    """
    Writes any experiment result exposing ``metadata``, ``to_dict()`` and either
    ``header``/``table_rows()`` or ``rows()`` (a RateReport).

    :return: the written path
    """
    os.makedirs(out_dir, exist_ok=True)
    metadata = result.metadata
    path = output_path(out_dir, experiment, metadata, fmt)

    if fmt == 'json':
        write_json(path, result.to_dict(), metadata)
    elif hasattr(result, 'table_rows'):
        write_csv(path, result.header, result.table_rows(), metadata)
    else:
        write_csv(path, rate_header(), result.rows(), metadata)

    logger.info('Wrote {}'.format(path))
    return path
