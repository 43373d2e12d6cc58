from nonlocal_crossdiff import initial, kernel, registry
from nonlocal_crossdiff.exceptions import ValidationFailure
from nonlocal_crossdiff.grid import Mesh, TimeGrid
from nonlocal_crossdiff.mobility import RULES, UPWIND
from nonlocal_crossdiff.model import HYPOTHESIS_MODES, STRICT, ModelParams
from nonlocal_crossdiff.runs import EXPERIMENTS, LOCALIZATION, SINGLE, RunConfig

from rest_framework import serializers

"""
Validators
"""
TERM_FIELDS = {
  'constant': ['value'],
  'indicator': ['lo', 'hi'],
  'hat': ['center', 'half_width'],
  'cosine': ['amplitude'],
  'sampled': ['values'],
}

def _domain_errors(field, build):
  """ Run a domain constructor, reporting its ValidationFailure under field """
  try:
    return build()
  except ValidationFailure as e:
    raise serializers.ValidationError({field: [str(e)]})


def term_validator(data):
  for key in TERM_FIELDS[data['type']]:
    if key not in data:
      raise serializers.ValidationError({key: ["This field is required if type=\"{}\".".format(data['type'])]})
  _domain_errors('type', lambda: initial.term_from_dict(data))


def kernel_validator(data):
  _domain_errors('shape', lambda: kernel_spec_from_dict(data))


def model_validator(data):
  n = data['n']
  A = data['A']
  if len(A) != n or any(len(row) != n for row in A):
    raise serializers.ValidationError({'A': ["Must be a {0}x{0} matrix.".format(n)]})

  if len(data['pi']) != n:
    raise serializers.ValidationError({'pi': ["Must hold {} weights.".format(n)]})
  if any(p <= 0 for p in data['pi']):
    raise serializers.ValidationError({'pi': ["Weights must be positive."]})

  for k in data.get('kernels', []):
    i, j = k['pair']
    if i == j or i > n or j > n:
      raise serializers.ValidationError({'kernels': ["Pair {} is not a pair of distinct species in 1..{}.".format(k['pair'], n)]})

  _domain_errors('model', lambda: model_params_from_dict(data))


def time_validator(data):
  if data['T'] <= 0:
    raise serializers.ValidationError({'T': ["Must be positive."]})
  if data['dt'] <= 0 or data['dt'] > data['T']:
    raise serializers.ValidationError({'dt': ["Must lie in (0, T]."]})
  steps = round(data['T'] / data['dt'])
  if abs(steps * data['dt'] - data['T']) > 1e-9 * data['T']:
    raise serializers.ValidationError({'dt': ["T must be a whole number of time steps."]})


def initial_validator(data):
  if ('profiles' in data) == ('preset' in data):
    raise serializers.ValidationError({'profiles': ["Give either 'profiles' or 'preset'."]})
  if 'preset' in data:
    _domain_errors('preset', lambda: registry.get_preset(data['preset']))


def run_config_validator(data):
  n = data['model']['n']
  if len(_profiles(data['initial'])) != n:
    raise serializers.ValidationError({'initial': ["Must describe {} species.".format(n)]})

  T = data['time']['T']
  late = [t for t in data.get('outputs', {}).get('snapshot_times', []) if not 0 < t <= T * (1 + 1e-12)]
  if late:
    raise serializers.ValidationError({'outputs': ["Snapshot times {} are outside (0, T = {}].".format(late, T)]})

  experiment = data.get('experiment', {'kind': SINGLE})
  if experiment['kind'] == LOCALIZATION and 'family' not in experiment:
    raise serializers.ValidationError({'experiment': ["Localization studies need a kernel 'family'."]})


"""
Builders
"""
def kernel_spec_from_dict(data):
  return kernel.KernelSpec(
    shape=data['shape'],
    radius=data.get('radius'),
    height=data.get('height', 1.0),
    width=data.get('width'),
    unit_mass=data.get('unit_mass', False),
    weights=tuple(data['weights']) if 'weights' in data else None,
  )


def model_params_from_dict(data):
  kernels = {}
  for k in data.get('kernels', []):
    i, j = k['pair']
    kernels[(i - 1, j - 1)] = kernel_spec_from_dict(k)
  return ModelParams(n=data['n'], A=data['A'], pi=data['pi'], sigma=data['sigma'], kernels=kernels,
                     mobility=data.get('mobility', UPWIND), hypothesis_mode=data.get('hypothesis_mode', STRICT))


def _profiles(initial_data):
  if 'preset' in initial_data:
    return registry.get_preset(initial_data['preset']).config['initial']['profiles']
  return initial_data['profiles']


"""
Serializers
"""
class StrictSerializer(serializers.Serializer):
  """ Rejects keys that are not declared fields """
  def to_internal_value(self, data):
    if isinstance(data, dict):
      unknown = sorted(set(data) - set(self.fields))
      if unknown:
        raise serializers.ValidationError({key: ["Unknown field."] for key in unknown})
    return super(StrictSerializer, self).to_internal_value(data)


class TermSerializer(StrictSerializer):
  type = serializers.ChoiceField(choices=sorted(initial.TERM_TYPES))
  value = serializers.FloatField(required=False)
  lo = serializers.FloatField(required=False)
  hi = serializers.FloatField(required=False)
  height = serializers.FloatField(required=False)
  center = serializers.FloatField(required=False)
  half_width = serializers.FloatField(required=False)
  amplitude = serializers.FloatField(required=False)
  frequency = serializers.IntegerField(required=False, min_value=1)
  phase = serializers.FloatField(required=False)
  values = serializers.ListField(child=serializers.FloatField(), required=False)

  class Meta:
    validators = [term_validator]


class KernelSpecSerializer(StrictSerializer):
  pair = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=2, max_length=2)
  shape = serializers.ChoiceField(choices=kernel.SHAPES)
  radius = serializers.FloatField(required=False)
  height = serializers.FloatField(required=False)
  width = serializers.FloatField(required=False)
  unit_mass = serializers.BooleanField(required=False)
  weights = serializers.ListField(child=serializers.FloatField(), required=False)

  class Meta:
    validators = [kernel_validator]


class ModelParamsSerializer(StrictSerializer):
  n = serializers.IntegerField(min_value=1)
  A = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
  pi = serializers.ListField(child=serializers.FloatField())
  sigma = serializers.FloatField(min_value=0.0)
  kernels = KernelSpecSerializer(many=True, required=False)
  mobility = serializers.ChoiceField(choices=RULES, required=False)
  hypothesis_mode = serializers.ChoiceField(choices=HYPOTHESIS_MODES, required=False)

  class Meta:
    validators = [model_validator]


class MeshSerializer(StrictSerializer):
  N = serializers.IntegerField(min_value=3)


class TimeSerializer(StrictSerializer):
  T = serializers.FloatField()
  dt = serializers.FloatField()

  class Meta:
    validators = [time_validator]


class InitialSerializer(StrictSerializer):
  profiles = serializers.ListField(child=TermSerializer(many=True), required=False)
  preset = serializers.CharField(required=False)

  class Meta:
    validators = [initial_validator]


class OutputsSerializer(StrictSerializer):
  run_id = serializers.RegexField(r'^[A-Za-z0-9_.-]+$', required=False)
  snapshot_times = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False)
  directory = serializers.CharField(required=False)
  kernels = serializers.BooleanField(required=False)


class ExperimentSerializer(StrictSerializer):
  kind = serializers.ChoiceField(choices=EXPERIMENTS)
  N_end = serializers.IntegerField(required=False, min_value=3)
  family = serializers.ChoiceField(choices=registry.LOCALIZATION_FAMILIES, required=False)
  alpha_max_power = serializers.IntegerField(required=False, min_value=0)


class RunConfigSerializer(StrictSerializer):
  model = ModelParamsSerializer()
  mesh = MeshSerializer()
  time = TimeSerializer()
  initial = InitialSerializer()
  outputs = OutputsSerializer(required=False)
  experiment = ExperimentSerializer(required=False)

  class Meta:
    validators = [run_config_validator]

  def create(self, validated_data):
    outputs = validated_data.get('outputs', {})
    profiles = [initial.profile_from_terms(terms) for terms in _profiles(validated_data['initial'])]

    return RunConfig(
      params=model_params_from_dict(validated_data['model']),
      mesh=Mesh(validated_data['mesh']['N']),
      time_grid=TimeGrid.from_step(validated_data['time']['T'], validated_data['time']['dt']),
      profiles=profiles,
      run_id=outputs.get('run_id', 'run'),
      snapshot_times=list(outputs.get('snapshot_times', [])),
      output_dir=outputs.get('directory'),
      dump_kernels=outputs.get('kernels', False),
      experiment=dict(validated_data.get('experiment', {'kind': SINGLE})),
      source=validated_data,
    )


def load_run_config(data):
  """ Validate a config document and build the run it describes """
  serializer = RunConfigSerializer(data=data)
  serializer.is_valid(raise_exception=True)
  return serializer.save()
