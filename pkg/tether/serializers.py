'''
Tether validates every externally supplied configuration and renders every
result payload with DRF serializers.

Input serializers turn CLI flags or YAML config mappings into the frozen config
dataclasses. Output serializers take plain mappings or result objects and are
rendered with :func:`render_json`; non-finite numbers become ``null``.
'''

import dataclasses
import math
from typing import Any

from ._util import clean_json, setup_django

setup_django()

from rest_framework import serializers  # noqa: E402
from rest_framework.renderers import JSONRenderer  # noqa: E402

from .types import (  # noqa: E402
    METHODS, AscentConfig, BlockModelSpec, FeatureGenConfig, FitConfig, GridSpec, SbmConfig, TabuConfig, VerifyConfig,
)

SEED_MAX = 2 ** 64 - 1


def render_json(data: Any) -> bytes:
    return JSONRenderer().render(clean_json(data), renderer_context={'indent': 2}) + b'\n'


class FiniteFloat(serializers.FloatField):
    def to_representation(self, value):
        if value is None:
            return None
        value = float(value)
        return value if math.isfinite(value) else None


class CleanJSON(serializers.JSONField):
    def to_representation(self, value):
        return clean_json(value)


class PositiveFloat(serializers.FloatField):
    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        if not value > 0:
            raise serializers.ValidationError('Ensure this value is greater than 0.')
        return value


def _split(value):
    if isinstance(value, str):
        return [token.strip() for token in value.split(',') if token.strip()]
    return value


class CommaList(serializers.ListField):
    '''
    A list field that also accepts a comma separated string.
    '''

    def to_internal_value(self, data):
        return super().to_internal_value(_split(data))


class MethodChoice(serializers.ChoiceField):
    default_error_messages = {
        'invalid_choice': '"{input}" is not a valid method, expected one of ' + ', '.join(METHODS) + '.',
    }


# Input


class FitSerializer(serializers.Serializer):
    k = serializers.IntegerField(min_value=1, default=2)
    alpha = PositiveFloat(default=1.0)
    w = serializers.FloatField(default=5.0)
    lam = serializers.FloatField(min_value=0, default=1e-5)
    mbeta = PositiveFloat(default=5.0)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    min_size = serializers.IntegerField(min_value=1, default=1)
    restarts = serializers.IntegerField(min_value=1, default=5)
    tenure = serializers.IntegerField(min_value=0, default=3)
    max_sweeps = serializers.IntegerField(min_value=1, default=50)
    max_iters = serializers.IntegerField(min_value=1, default=20)
    kinds = serializers.CharField(required=False, allow_blank=True)
    initializer = serializers.ChoiceField(['joint', 'spectral', 'kmeans', 'random'], default='joint')
    min_variance = serializers.FloatField(min_value=0, default=0.0)
    standardize = serializers.BooleanField(default=False)

    def validate_w(self, value):
        if not value > 1:
            raise serializers.ValidationError('w_n must be greater than 1.')
        return value

    def to_config(self) -> FitConfig:
        return self.build_config(self.validated_data)

    @staticmethod
    def build_config(data) -> FitConfig:
        return FitConfig(
            k=data['k'],
            alpha=data['alpha'],
            w_n=data['w'],
            lam=data['lam'],
            m_beta=data['mbeta'],
            max_outer_iters=data['max_iters'],
            min_community_size=data['min_size'],
            tabu=TabuConfig(tenure=data['tenure'], max_sweeps=data['max_sweeps'], restarts=data['restarts']),
            ascent=AscentConfig(),
            seed=data['seed'],
        )


class BaselineSerializer(serializers.Serializer):
    method = serializers.ChoiceField(['sc', 'km'])
    k = serializers.IntegerField(min_value=1, default=2)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    tau = serializers.FloatField(min_value=0, default=1e-7)
    n_starts = serializers.IntegerField(min_value=1, default=10)
    row_normalize = serializers.BooleanField(default=False)
    kinds = serializers.CharField(required=False, allow_blank=True)


class SbmSerializer(serializers.Serializer):
    community_sizes = CommaList(child=serializers.IntegerField(min_value=1), min_length=1, default=[100, 50])
    within_prob = serializers.FloatField(min_value=0, max_value=1, default=0.1)
    density_scale = serializers.FloatField(min_value=0, max_value=1, default=1.0)
    hub_fraction = serializers.FloatField(min_value=0, max_value=1, default=0.05)
    hub_theta = serializers.FloatField(min_value=1, default=10.0)
    base_theta = PositiveFloat(default=1.0)
    prob_cap = serializers.FloatField(min_value=0, max_value=1, default=0.99)


class SimulateSerializer(serializers.Serializer):
    grid = serializers.ChoiceField(['desk', 'paper'], default='desk')
    methods = CommaList(child=MethodChoice(METHODS), min_length=1, default=list(METHODS))
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    replications = serializers.IntegerField(min_value=1, required=False)
    r_values = CommaList(child=serializers.FloatField(min_value=0, max_value=1), min_length=1, required=False)
    mu_values = CommaList(child=serializers.FloatField(min_value=0), min_length=1, required=False)
    n_noise = serializers.IntegerField(min_value=0, default=1)
    workers = serializers.IntegerField(min_value=1, default=1)
    sbm = SbmSerializer(required=False)
    fit = FitSerializer(required=False)

    def to_spec(self) -> GridSpec:
        data = self.validated_data
        overrides = {
            key: tuple(data[key]) if isinstance(data[key], list) else data[key]
            for key in ('replications', 'r_values', 'mu_values')
            if key in data
        }
        sbm = SbmConfig(**data['sbm']) if 'sbm' in data else SbmConfig()
        fit = FitSerializer.build_config(data['fit']) if 'fit' in data else FitConfig()
        fit = dataclasses.replace(fit, k=sbm.k)
        factory = GridSpec.paper if data['grid'] == 'paper' else GridSpec.desk
        return factory(
            methods=tuple(data['methods']),
            sbm=sbm,
            features=FeatureGenConfig(n_noise=data['n_noise']),
            fit=fit,
            seed=data['seed'],
            **overrides,
        )


class VerifySerializer(serializers.Serializer):
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    within_prob = serializers.FloatField(min_value=0, max_value=1, default=0.1)
    r = serializers.FloatField(min_value=0, max_value=1, default=0.25)
    community_sizes = CommaList(child=serializers.IntegerField(min_value=1), min_length=1, default=[100, 50])
    alpha = PositiveFloat(default=1.0)
    w = serializers.FloatField(default=5.0)
    mbeta = PositiveFloat(default=5.0)
    mphi = serializers.FloatField(min_value=0, required=False)
    samples = serializers.IntegerField(min_value=1, default=10_000)
    instances = serializers.IntegerField(min_value=1, default=20)
    replicates = serializers.IntegerField(min_value=1, default=20)
    sizes = CommaList(child=serializers.IntegerField(min_value=4), min_length=2, default=[60, 120, 240])
    mc_samples = serializers.IntegerField(min_value=2, default=2000)
    mu = serializers.FloatField(min_value=0, default=1.0)

    def validate_w(self, value):
        if not value > 1:
            raise serializers.ValidationError('w_n must be greater than 1.')
        return value

    def to_block_model(self) -> BlockModelSpec:
        data = self.validated_data
        sbm = SbmConfig(community_sizes=tuple(data['community_sizes']), within_prob=data['within_prob'], out_in_ratio=data['r'])
        return BlockModelSpec.from_sbm(sbm)

    def to_config(self) -> VerifyConfig:
        data = self.validated_data
        return VerifyConfig(
            block_model=self.to_block_model(),
            alpha=data['alpha'],
            w_n=data['w'],
            m_beta=data['mbeta'],
            m_phi=data.get('mphi'),
            samples=data['samples'],
            instances=data['instances'],
            replicates=data['replicates'],
            sizes=tuple(data['sizes']),
            mc_samples=data['mc_samples'],
            mu=data['mu'],
            seed=data['seed'],
        )


# Output


class CoefficientSerializer(serializers.Serializer):
    community = serializers.IntegerField()
    coefficients = serializers.DictField(child=FiniteFloat())


class FitOutputSerializer(serializers.Serializer):
    SCHEMA_VERSION = 1

    schema_version = serializers.IntegerField()
    command = serializers.CharField()
    method = serializers.CharField()
    labels = serializers.ListField(child=serializers.IntegerField(allow_null=True))
    betas = CoefficientSerializer(many=True, required=False)
    trace = serializers.ListField(child=FiniteFloat(), required=False)
    criterion = FiniteFloat(required=False)
    converged = serializers.BooleanField(required=False)
    iterations = serializers.IntegerField(required=False)
    feature_names = serializers.ListField(child=serializers.CharField(), required=False)
    dropped_nodes = serializers.ListField(child=serializers.IntegerField())
    reference_nmi = serializers.DictField(child=FiniteFloat(allow_null=True), required=False)
    config = CleanJSON()
    inputs = serializers.DictField(child=serializers.CharField())
    timing = CleanJSON()


class CellSerializer(serializers.Serializer):
    method = serializers.CharField()
    r = FiniteFloat()
    mu = FiniteFloat()
    nmis = serializers.ListField(child=FiniteFloat(allow_null=True))
    mean = FiniteFloat(allow_null=True)
    sd = FiniteFloat(allow_null=True)
    failures = serializers.IntegerField()


class GridSummarySerializer(serializers.Serializer):
    SCHEMA_VERSION = 1

    schema_version = serializers.IntegerField()
    command = serializers.CharField()
    spec = CleanJSON()
    cells = CellSerializer(many=True)
    timing = CleanJSON()


class CheckItemSerializer(serializers.Serializer):
    name = serializers.CharField()
    status = serializers.SerializerMethodField()
    value = CleanJSON(allow_null=True)
    detail = serializers.CharField(allow_blank=True)

    def get_status(self, item):
        return item.status.name.lower()


class CheckReportSerializer(serializers.Serializer):
    SCHEMA_VERSION = 1

    schema_version = serializers.IntegerField()
    command = serializers.CharField()
    ok = serializers.BooleanField()
    items = CheckItemSerializer(many=True)
    config = CleanJSON()
    timing = CleanJSON()
