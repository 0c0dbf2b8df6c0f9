# Permite que critical_gf sea reconocido como un paquete Python.
__version__ = "0.1.0"
