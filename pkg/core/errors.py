"""
Jerarquía de excepciones del motor Glauber.
Ubicación: core/errors.py

Cada excepción hereda además del builtin equivalente, de modo que el código
cliente puede capturar tanto GlauberError como ValueError, IndexError, etc.
"""


class GlauberError(Exception):
    """Error base de todos los módulos del motor."""


class InvalidInputError(GlauberError, ValueError):
    """Entrada mal formada (conteos vacíos, tokens fuera del alfabeto, ...)."""


class StepRangeError(GlauberError, IndexError):
    """Índice de paso t fuera de 0..T-1."""


class ResourceLimitError(GlauberError, MemoryError):
    """La enumeración exacta supera el tope configurado de estados."""


class UnsupportedConfigurationError(GlauberError, ValueError):
    """Configuración que el algoritmo no soporta (p. ej. Π(·|X) variable en el tiempo)."""


class UndefinedConditionalError(GlauberError, ArithmeticError):
    """Probabilidad condicional sobre un evento de probabilidad cero."""


class NumericGuardError(GlauberError, FloatingPointError):
    """Valor sin recortar que produciría log(0) o división por cero."""


class DomainError(GlauberError, ValueError):
    """Parámetro fuera del dominio de una fórmula cerrada."""


class DegenerateDistributionError(GlauberError, ArithmeticError):
    """Todas las puntuaciones son cero: no existe distribución que muestrear."""


class ShapeMismatchError(GlauberError, ValueError):
    """Dos tablas de probabilidad con (L, V) distintos."""


class EvaluationError(GlauberError, ArithmeticError):
    """Condicional nula durante la evaluación NLL/PPL sin probabilidad mínima."""


class InsufficientSamplesError(GlauberError, ValueError):
    """Muy pocas muestras para la prueba de bondad de ajuste."""


class InvalidConfigurationError(GlauberError, ValueError):
    """Configuración del muestreador incompatible con la propagación exacta."""


class ConfigError(GlauberError, ValueError):
    """Error en la configuración del experimento (código de salida 2)."""


class CertificationError(GlauberError):
    """Una cota certificada no se cumple (código de salida 3)."""
