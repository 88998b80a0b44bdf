"""Module providing common definitions."""

import math


class ConfigError(Exception):
    """Configuration error.

    Generic configuration error exception class, which can be used by any
    configurable component (fields, sections, impulses, scenarios).
    """

    def __init__(self, msg, config=None):
        """Initialize configuration error instance.

        :param config: invalid configuration (default: None)
        :type config: dict
        """
        super().__init__(msg)
        self.config = config


class AnalysisError(Exception):
    """Base class of all errors raised while analysing an impulsive system.

    The attribute ``jump_index`` is set by trajectory computations to the
    index of the jump during which the error occurred.
    """

    def __init__(self, msg, jump_index=None):
        super().__init__(msg)
        self.jump_index = jump_index


class DomainError(AnalysisError):
    """Point outside the declared phase domain of a vector field."""


class StepError(AnalysisError):
    """Integration step produced a non-finite state."""


class ChartError(AnalysisError):
    """Chart point outside the chart box of a cross-section."""


class SingularityError(AnalysisError):
    """Vector field vanishes on a cross-section."""


class GrazingHit(AnalysisError):
    """Section crossing (nearly) tangent to the flow."""


class BoundaryHit(AnalysisError):
    """Section crossing within the boundary margin of the section."""


class NoReturn(AnalysisError):
    """No crossing of the impulsive region within the time horizon."""


class NoCrossing(AnalysisError):
    """No crossing of the target section within the time bound."""


class MultipleCrossings(AnalysisError):
    """More than one crossing of the target section within the time bound."""


class IncompatibleSections(AnalysisError):
    """Impulses defined between different pairs of sections."""


class BudgetExceeded(AnalysisError):
    """Perturbation does not fit into the C1 budget."""


class SupportOutsideChart(AnalysisError):
    """Bump support leaves the chart box of the target section."""


class NotFound(AnalysisError):
    """Search (periodic orbit, pseudo-orbit) did not succeed."""


class SingularJacobian(NotFound):
    """Newton search failed after falling back to least-squares steps."""


class ContinuationFailed(AnalysisError):
    """Periodic orbit could not be continued to a perturbed impulse."""

    def __init__(self, msg, segment=None):
        super().__init__(msg)
        self.segment = segment


class HyperbolizationFailed(AnalysisError):
    """No hyperbolic perturbation found within the number of attempts."""


class ClosingFailure(AnalysisError):
    """Pseudo-orbit could not be closed.

    The attribute ``reason`` is one of "chain", "budget", "supports" or
    "verification".
    """

    def __init__(self, msg, reason, plan=None):
        super().__init__(msg)
        self.reason = reason
        self.plan = plan


class InvalidSystem(AnalysisError):
    """Impulsive system failed validation."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class UnknownExample(ConfigError):
    """Example name not known."""


class BadParams(ConfigError):
    """Example parameters outside their documented ranges."""


def check_valid_required(config, valid_keys, required_keys):
    """Check for valid and required configuration parameters.

    Checks whether only valid and all required parameters (keys) have been
    specified. Raises a configuration error exception otherwise.

    :param config: configuration to be checked
    :type config: dict
    :param valid_keys: valid configuration keys
    :type valid keys: set
    :param required_keys: required configuration keys
    :type required_keys: set
    :raises: ConfigError
    """
    if not isinstance(config, dict):
        raise ConfigError(f"The configuration must be a dictionary, but '{config}' has been specified.", config)

    # Make sure only valid parameters have been specified.
    keys = set(config.keys())
    if not keys.issubset(valid_keys):
        raise ConfigError(f"The configuration contains additional parameters. Only the parameters {sorted(valid_keys)} are accepted, but the additional parameter(s) {sorted(keys.difference(valid_keys))} has/have been specified.", config)

    # Make sure all required parameters have been specified.
    if not required_keys.issubset(keys):
        raise ConfigError(f"As a minimum, the parameters {sorted(required_keys)} are required, but the parameter(s) {sorted(required_keys.difference(keys))} has/have not been specified.", config)


def check_param(name, value, recurse=False, required=True, is_int=False, is_bool=False, is_str=False, is_num=False, is_list=False, length=None, gr=None, ge=None, lo=None, le=None, options=None):
    """Check validity of configuration parameter.

    Checks the validity of a configuration parameter based on specified
    tests. Raises a configuration error exception if acceptance criteria are
    not met.

    The parameter value may either be provided directly or indirectly
    in the form of a dictionary. If a dictionary is provided as value, the
    parameter value is looked up via the parameter name.

    The function allows to recurse into lists, for instance if the parameter
    value is a list of numbers. In this case, specified tests are applied to
    each element of the list.

    :param name: parameter name
    :type name: str
    :param value: parameter value or dictionary
    :type value: type of parameter value or dict
    :param recurse: True if function shall recurse into lists
    :type recurse: bool
    :param required: True if parameter must exist in dictionary
    :type required: bool
    :param is_int: True if value must be integer
    :type is_int: bool
    :param is_bool: True if value must be boolean
    :type is_bool: bool
    :param is_str: True if value must be a non-empty string
    :type is_str: bool
    :param is_num: True if value must be a finite real number
    :type is_num: bool
    :param is_list: True if value must be a non-empty list
    :type is_list: bool
    :param length: required list length (only with is_list)
    :type length: int
    :param gr: parameter value must be > gr
    :type gr: numeric
    :param ge: parameter value must be >= ge
    :type ge: numeric
    :param lo: parameter value must be < lo
    :type lo: numeric
    :param le: parameter value must be <= le
    :type le: numeric
    :param options: valid parameter values
    :type options: set or list
    :raises: ConfigError
    """
    config = value
    # Obtain parameter value from dictionary if dictionary specified.
    if isinstance(value, dict):
        if name in config:
            value = config.get(name)
            if value is None:
                raise ConfigError(f"Parameter '{name}' does not have a value.", config)
        else:
            if required is True: raise ConfigError(f"No value for required parameter '{name}' specified.", config)
            else: return

    # Compile generic error message prefix.
    prefix = f"Invalid value '{value}' for parameter '{name}' specified."

    # Ensure that value is a list of the requested length.
    if is_list:
        if not isinstance(value, (list, tuple)) or len(value) == 0:
            raise ConfigError(f"{prefix} Value must be a non-empty list.", config)
        if length is not None and len(value) != length:
            raise ConfigError(f"{prefix} Value must be a list of length {length}.", config)

    # Recurse into list items if requested.
    if isinstance(value, (list, tuple)):
        if recurse:
            for v in value:
                check_param(name, v, False, required, is_int, is_bool, is_str, is_num, False, None, gr, ge, lo, le, options)
        # Prevent all further tests.
        return

    # Ensure that value is boolean.
    if is_bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{prefix} Value must be boolean (true or false).", config)
        return

    # Ensure that value is a valid, non-empty string.
    if is_str:
        if not isinstance(value, str) or len(value) == 0:
            raise ConfigError(f"{prefix} Value must be a non-empty string.", config)
        if options is not None and value not in options:
            raise ConfigError(f"{prefix} Valid values are {sorted(options)}.", config)
        return

    # Ensure that value is integer.
    if is_int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ConfigError(f"{prefix} Value must be integer.", config)
    # Ensure that value is a finite real number.
    if is_num and (isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value)):
        raise ConfigError(f"{prefix} Value must be a finite number.", config)
    # Ensure that value is greater than a certain value.
    if gr is not None and not value > gr:
        raise ConfigError(f"{prefix} Value must be > {gr}.", config)
    # Ensure that value is greater than or equal to a certain value.
    if ge is not None and not value >= ge:
        raise ConfigError(f"{prefix} Value must be >= {ge}.", config)
    # Ensure that value is lower than a certain value.
    if lo is not None and not value < lo:
        raise ConfigError(f"{prefix} Value must be < {lo}.", config)
    # Ensure that value is lower than or equal to a certain value.
    if le is not None and not value <= le:
        raise ConfigError(f"{prefix} Value must be <= {le}.", config)
    # Ensure that value is one of pre-defined options.
    if options is not None and value not in options:
        raise ConfigError(f"{prefix} Valid values are {options}.", config)


def wrap_angle(a):
    """Reduce angles into the interval [-pi, pi).

    :param a: angle(s)
    :type a: float or numpy.ndarray
    :returns: reduced angle(s)
    """
    return (a + math.pi) % (2 * math.pi) - math.pi
