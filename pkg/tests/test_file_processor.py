import json
import math
from fractions import Fraction

import numpy as np
import pandas as pd

from src.core.params import ProblemParams
from src.data_processing.file_processor import ResultFileProcessor


def test_to_jsonable_handles_numeric_edge_values():
    payload = {
        'inf': math.inf,
        'neg': -math.inf,
        'nan': float('nan'),
        'ratio': Fraction(-3, 4),
        'array': np.array([1.0, np.inf]),
        'flag': np.bool_(True),
        'count': np.int64(4),
        1: (0.5,),
    }
    assert ResultFileProcessor.to_jsonable(payload) == {
        'inf': 'inf',
        'neg': '-inf',
        'nan': None,
        'ratio': '-3/4',
        'array': [1.0, 'inf'],
        'flag': True,
        'count': 4,
        '1': [0.5],
    }


def test_models_are_dumped_with_aliases():
    params = ProblemParams(N=3, k=1.5, p=5.5, lam=0.5)
    assert ResultFileProcessor.to_jsonable(params) == {'N': 3, 'k': 1.5, 'p': 5.5, 'lambda': 0.5}


def test_json_writes_are_deterministic(tmp_path):
    ResultFileProcessor.initialize_output_directory(str(tmp_path / 'a'))
    first = ResultFileProcessor.write_json({'b': 1, 'a': [math.inf]}, 'report.json')
    content = open(first, encoding='utf-8').read()
    ResultFileProcessor.write_json({'a': [math.inf], 'b': 1}, 'report.json')
    assert open(first, encoding='utf-8').read() == content
    assert json.loads(content) == {'a': ['inf'], 'b': 1}
    assert content.index('"a"') < content.index('"b"')


def test_csv_keeps_column_order_and_precision(tmp_path):
    ResultFileProcessor.initialize_output_directory(str(tmp_path))
    frame = pd.DataFrame({'v': [1.0 / 3.0], 'r': [0.1]})
    path = ResultFileProcessor.write_csv(frame, 'trace.csv', columns=['r', 'v'])
    lines = open(path, encoding='utf-8').read().splitlines()
    assert lines[0] == 'r,v'
    r, v = (float(x) for x in lines[1].split(','))
    assert r == 0.1
    assert v == 1.0 / 3.0
    assert not list(tmp_path.glob('*.tmp'))
