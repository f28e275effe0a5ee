from ruamel.yaml import YAML

from .types import RunManifest


def get_yaml():
    yaml = YAML(typ='safe')
    yaml.width = 120
    yaml.default_flow_style = False
    yaml.register_class(RunManifest)
    return yaml
