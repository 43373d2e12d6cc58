"""
Face mobilities u_{l+1/2} = F(u_l, u_{l+1}) and the discrete chain rule

  F (p_{l+1} - p_l)(log u_{l+1} - log u_l) >= c0 (p_{l+1} - p_l)(u_{l+1} - u_l)

which both rules satisfy with c0 = 1.
"""
import numpy as np

from nonlocal_crossdiff.exceptions import ValidationFailure

UPWIND = 'upwind'
LOGMEAN = 'logmean'
RULES = (UPWIND, LOGMEAN)

C0 = 1.0

# below this log-gap the logarithmic mean is replaced by the arithmetic mean
LOGMEAN_SWITCH = 1e-8

# floor applied to Newton iterates inside logmean evaluations only
POSITIVITY_FLOOR = 1e-14


def check_rule(rule):
  if rule not in RULES:
    raise ValidationFailure("Mobility must be one of {}, got '{}'.".format(RULES, rule))
  return rule


def _check_nonnegative(*arrays):
  for a in arrays:
    if np.any(np.asarray(a) < 0):
      raise ValidationFailure("Mobility inputs must be nonnegative.")


def logmean(uL, uR):
  """ (uR - uL) / (log uR - log uL), uL on the diagonal, 0 if either vanishes """
  uL = np.asarray(uL, dtype=float)
  uR = np.asarray(uR, dtype=float)
  positive = (uL > 0) & (uR > 0)
  safe_L = np.where(positive, uL, 1.0)
  safe_R = np.where(positive, uR, 1.0)
  gap = np.log1p((safe_R - safe_L) / safe_L)
  near = np.abs(gap) < LOGMEAN_SWITCH
  ratio = (safe_R - safe_L) / np.where(near, 1.0, gap)
  value = np.where(near, 0.5 * (safe_L + safe_R), ratio)
  return np.where(positive, value, 0.0)


def logmean_partials(uL, uR):
  """ Partial derivatives of the logarithmic mean with respect to uL and uR """
  uL = np.asarray(uL, dtype=float)
  uR = np.asarray(uR, dtype=float)
  positive = (uL > 0) & (uR > 0)
  safe_L = np.where(positive, uL, 1.0)
  safe_R = np.where(positive, uR, 1.0)
  gap = np.log1p((safe_R - safe_L) / safe_L)
  near = np.abs(gap) < 1e-6
  L = logmean(safe_L, safe_R)
  denom = np.where(near, 1.0, gap)
  dL = np.where(near, 0.5, (L / safe_L - 1.0) / denom)
  dR = np.where(near, 0.5, (1.0 - L / safe_R) / denom)
  return np.where(positive, dL, 0.0), np.where(positive, dR, 0.0)


def face_mobility(rule, uL, uR, dp=None):
  """
  Mobility on the face between uL and uR. dp = p_R - p_L picks the upwind
  branch; dp >= 0 takes uR.
  """
  check_rule(rule)
  _check_nonnegative(uL, uR)
  if rule == UPWIND:
    if dp is None:
      raise ValidationFailure("Upwind mobility needs the potential increment dp.")
    return np.where(np.asarray(dp) >= 0, uR, uL) * 1.0
  return logmean(uL, uR)


def face_mobility_unchecked(rule, uL, uR, dp):
  """ Mobility for solver iterates, which may dip below zero """
  if rule == UPWIND:
    return np.where(dp >= 0, uR, uL)
  return logmean(np.maximum(uL, POSITIVITY_FLOOR), np.maximum(uR, POSITIVITY_FLOOR))


def chain_rule_defect(rule, uL, uR, dp):
  """ F dp (log uR - log uL) - c0 dp (uR - uL); nonnegative for admissible rules """
  uL = np.asarray(uL, dtype=float)
  uR = np.asarray(uR, dtype=float)
  if np.any(uL <= 0) or np.any(uR <= 0):
    raise ValidationFailure("The chain rule is stated for positive densities.")
  F = face_mobility(rule, uL, uR, dp)
  return F * dp * (np.log(uR) - np.log(uL)) - C0 * dp * (uR - uL)
