from io import StringIO

import numpy as np
import pytest

from tether.errors import ParseError, VerificationFailed
from tether.manifest import MANIFEST_NAME, read_manifest, save_manifest, start_manifest, verify_digests, write_manifest


def test_manifest_roundtrip(tmp_path):
    data = tmp_path / 'edges.tsv'
    data.write_text('0\t1\n')
    manifest = start_manifest('fit', {'k': np.int64(2), 'sizes': (1, 2)}, [str(data)], seed=5)
    assert manifest.config == {'k': 2, 'sizes': [1, 2]}

    out = tmp_path / 'result.json'
    out.write_text('{}')
    path = save_manifest(manifest, str(tmp_path), [str(out)])
    assert path.endswith(MANIFEST_NAME)

    with open(path) as f:
        loaded = read_manifest(f)
    assert loaded.command == 'fit'
    assert loaded.seed == 5
    assert loaded.config == {'k': 2, 'sizes': [1, 2]}
    assert list(loaded.outputs) == ['result.json']
    assert loaded.finished >= loaded.started
    verify_digests(loaded)


def test_manifest_stream_layout():
    out = StringIO()
    write_manifest(start_manifest('simulate', {}), out)
    documents = out.getvalue().split('---\n')
    assert documents[0] == ''
    assert documents[1].startswith('_: header')
    assert '_: manifest' in documents[2]


def test_changed_inputs_are_detected(tmp_path):
    data = tmp_path / 'features.csv'
    data.write_text('node_id,x\n0,1\n')
    manifest = start_manifest('fit', {}, [str(data)])
    data.write_text('node_id,x\n0,2\n')
    with pytest.raises(VerificationFailed):
        verify_digests(manifest)
    data.unlink()
    with pytest.raises(VerificationFailed):
        verify_digests(manifest)


def test_read_manifest_errors():
    with pytest.raises(ParseError):
        read_manifest(StringIO('---\n_: header\nversion: 2\n'))
    with pytest.raises(ParseError):
        read_manifest(StringIO('---\n_: header\nversion: 1\n'))
    with pytest.raises(ParseError):
        read_manifest(StringIO('- 1\n'))
