import math


def validate_required_fields(data, required_fields):
    """
    Validate that required fields are present in data.
    Returns tuple (is_valid, missing_fields)
    """
    missing = []
    for field in required_fields:
        if field not in data or data[field] is None or data[field] == '':
            missing.append(field)

    return len(missing) == 0, missing


def is_real(value):
    """True for finite int/float values (booleans excluded)."""
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_normal_params(data, path):
    """
    Validate a {"mu", "sigma"} mapping.
    Returns tuple (is_valid, errors)
    """
    if not isinstance(data, dict):
        return False, [f"{path}: expected an object with 'mu' and 'sigma'"]

    is_valid, missing = validate_required_fields(data, ['mu', 'sigma'])
    if not is_valid:
        return False, [f"{path}: missing {', '.join(missing)}"]

    errors = []
    if not is_real(data['mu']):
        errors.append(f"{path}.mu: must be a finite number")
    if not is_real(data['sigma']) or data['sigma'] <= 0:
        errors.append(f"{path}.sigma: must be a positive number")

    return len(errors) == 0, errors


def validate_term(term, variables, path):
    """
    Validate one uncertain term {"A", "B", "exponents"}.
    Returns tuple (is_valid, errors)
    """
    if not isinstance(term, dict):
        return False, [f"{path}: expected an object"]

    errors = []
    for endpoint in ('A', 'B'):
        _, endpoint_errors = validate_normal_params(term.get(endpoint), f"{path}.{endpoint}")
        errors.extend(endpoint_errors)

    exponents = term.get('exponents', {})
    if not isinstance(exponents, dict):
        errors.append(f"{path}.exponents: expected a mapping from variable name to exponent")
    else:
        for name, value in exponents.items():
            if name not in variables:
                errors.append(f"{path}.exponents: unknown variable '{name}'")
            elif not is_real(value):
                errors.append(f"{path}.exponents.{name}: must be a finite number")

    return len(errors) == 0, errors


def validate_alpha(alpha):
    """
    Validate a confidence level.
    Returns tuple (is_valid, error_message)
    """
    if not is_real(alpha):
        return False, "Alpha must be a number"
    if not 0 < alpha < 1:
        return False, f"Alpha must lie strictly inside (0, 1), got {alpha}"
    return True, None


def validate_epsilon(epsilon):
    """
    Validate a tolerance level.
    Returns tuple (is_valid, error_message)
    """
    if not is_real(epsilon):
        return False, "Epsilon must be a number"
    if not 0 < epsilon <= 0.5:
        return False, f"Epsilon must lie in (0, 0.5], got {epsilon}"
    return True, None


def validate_alpha_grid(alphas):
    """
    Validate every grid point of an alpha sweep.
    Returns tuple (is_valid, errors)
    """
    alphas = list(alphas)
    if not alphas:
        return False, ["Alpha grid is empty"]

    errors = []
    for alpha in alphas:
        is_valid, error = validate_alpha(alpha)
        if not is_valid:
            errors.append(error)

    return len(errors) == 0, errors
