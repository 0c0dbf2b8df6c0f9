# Permite que GFRAG sea reconocido como un paquete Python.
from GFRAG.critical_gf import __version__ as __version__
