"""
Callbacks de consola para los controladores: barra de progreso y mensajes con íconos.
Ubicación: cli/console.py

Implementa las mismas firmas que consumen los controladores:
    progress_callback(current, total, message, percentage)
    log_gui_callback(mensaje, tipo)   con tipo ∈ {info, success, warning, error}
"""

import sys
from datetime import datetime

from tqdm import tqdm


class ConsoleProgress:
    """Barra tqdm que se crea en la primera llamada y se cierra al llegar al total."""

    def __init__(self, descripcion="Procesando", habilitada=True):
        self.descripcion = descripcion
        self.habilitada = habilitada
        self._barra = None

    def __call__(self, current, total, message, percentage):
        if not self.habilitada:
            return
        if self._barra is None or self._barra.total != total:
            self.close()
            self._barra = tqdm(total=total, desc=self.descripcion, file=sys.stderr, leave=False)
        self._barra.n = current
        self._barra.set_postfix_str(message, refresh=False)
        self._barra.refresh()
        if current >= total:
            self.close()

    def close(self):
        if self._barra is not None:
            self._barra.close()
            self._barra = None


class ConsoleLog:
    """Imprime mensajes con hora; los errores van a stderr."""

    def __init__(self, silencioso=False):
        self.silencioso = silencioso
        self.mensajes = []

    def __call__(self, mensaje, tipo="info"):
        self.mensajes.append((tipo, mensaje))
        if self.silencioso or not mensaje:
            return
        timestamp = datetime.now().strftime("%H:%M:%S")
        destino = sys.stderr if tipo in ("warning", "error") else sys.stdout
        tqdm.write(f"[{timestamp}] {mensaje}", file=destino)

    def text(self):
        """Contenido completo del log como texto plano."""
        return "\n".join(m for _, m in self.mensajes)
