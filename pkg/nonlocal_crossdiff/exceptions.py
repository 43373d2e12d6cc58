class CrossDiffError(Exception):
  """ Base class for every error raised by nonlocal_crossdiff """


##########################
# Input validation errors
##########################

class ValidationFailure(CrossDiffError, ValueError):
  pass

class MeshMismatch(ValidationFailure):
  pass

class KernelError(ValidationFailure):
  pass

class DetailedBalanceViolation(ValidationFailure):
  pass

class HypothesisH3Violation(ValidationFailure):
  pass

class NegativeData(ValidationFailure):
  pass


##########################
# Solver errors
##########################

class SolverFailure(CrossDiffError):
  def __init__(self, message, report=None):
    super(SolverFailure, self).__init__(message)
    self.report = report

class NewtonDivergence(SolverFailure):
  pass

class NegativeStateUnrecoverable(SolverFailure):
  pass

class MassDefectError(SolverFailure):
  pass


##########################
# Structure and study errors
##########################

class StructureViolation(CrossDiffError):
  pass

class EntropyIncrease(StructureViolation):
  pass

class CounterexampleFailure(StructureViolation):
  pass

class StudyFailure(CrossDiffError):
  """ Raised by the study drivers; carries the ladder level that failed """
  def __init__(self, message, level=None, cause=None):
    super(StudyFailure, self).__init__(message)
    self.level = level
    self.cause = cause
