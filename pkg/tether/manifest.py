'''
Run manifests record what produced a set of output files: the command, the
resolved configuration, digests of the inputs, the package version and the
seed. They are written as a YAML document stream with a header document
followed by the manifest document.
'''

import datetime
import logging
import os
from typing import IO, Dict, Iterable

from ._util import clean_json, file_digest
from ._yaml import get_yaml
from .errors import ParseError, VerificationFailed
from .types import RunManifest

logger = logging.getLogger('tether.manifest')

MANIFEST_NAME = 'manifest.yaml'


def now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds')


def start_manifest(command: str, config: Dict, inputs: Iterable[str] = (), seed: int = 0) -> RunManifest:
    from . import __version__

    return RunManifest(
        command=command,
        config=clean_json(config),
        digests={path: file_digest(path) for path in inputs},
        version=__version__,
        seed=seed,
        started=now(),
    )


def write_manifest(manifest: RunManifest, stream: IO[str]):
    yaml = get_yaml()
    header = {
        '_': 'header',
        'version': 1,
    }
    stream.write('---\n')
    yaml.dump(header, stream)
    stream.write('---\n')
    yaml.dump({'_': 'manifest', 'manifest': manifest}, stream)


def save_manifest(manifest: RunManifest, directory: str, outputs: Iterable[str] = ()) -> str:
    '''
    Stamps the finish time, records output digests and writes ``manifest.yaml`` into ``directory``.
    '''
    manifest.finished = now()
    manifest.outputs = {os.path.basename(path): file_digest(path) for path in sorted(outputs)}
    path = os.path.join(directory, MANIFEST_NAME)
    with open(path, 'w') as f:
        write_manifest(manifest, f)
    logger.info(f'Wrote {path}')
    return path


def read_manifest(source: IO[str], path: str = '<manifest>') -> RunManifest:
    yaml = get_yaml()
    manifest = None
    for document in yaml.load_all(source):
        if not isinstance(document, dict) or '_' not in document:
            raise ParseError('expected a document with a "_" marker', path)
        if document['_'] == 'header':
            if document.get('version') != 1:
                raise ParseError(f'unsupported manifest version {document.get("version")}', path)
        elif document['_'] == 'manifest':
            manifest = document['manifest']
    if not isinstance(manifest, RunManifest):
        raise ParseError('no manifest document found', path)
    return manifest


def verify_digests(manifest: RunManifest):
    '''
    Recomputes the digests of the recorded inputs.
    '''
    for path, digest in manifest.digests.items():
        if not os.path.exists(path):
            raise VerificationFailed(path, 'input file is missing')
        if file_digest(path) != digest:
            raise VerificationFailed(path, 'input file changed since the run')
