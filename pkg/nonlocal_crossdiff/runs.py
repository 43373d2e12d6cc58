"""
A validated run configuration, turned into domain objects.
"""
from dataclasses import dataclass, field

from nonlocal_crossdiff.grid import Mesh, TimeGrid

SINGLE = 'single'
CONVERGENCE = 'convergence'
LOCALIZATION = 'localization'
SEGREGATION = 'segregation'
EXPERIMENTS = (SINGLE, CONVERGENCE, LOCALIZATION, SEGREGATION)


@dataclass
class RunConfig:
  params: object
  mesh: Mesh
  time_grid: TimeGrid
  profiles: list
  run_id: str = 'run'
  snapshot_times: list = field(default_factory=list)
  output_dir: str = None
  dump_kernels: bool = False
  experiment: dict = field(default_factory=lambda: {'kind': SINGLE})
  source: dict = field(default_factory=dict)

  @property
  def kind(self):
    return self.experiment.get('kind', SINGLE)

  @property
  def dt(self):
    return self.time_grid.dt

  def with_mesh(self, N, dt):
    """ Same run on another mesh and time step """
    return RunConfig(params=self.params, mesh=Mesh(N), time_grid=TimeGrid.from_step(self.time_grid.T, dt),
                     profiles=self.profiles, run_id=self.run_id, snapshot_times=self.snapshot_times,
                     output_dir=self.output_dir, dump_kernels=self.dump_kernels, experiment=self.experiment,
                     source=self.source)
