"""
Paquete core con la lógica del modelo generativo de Glauber: tablas exactas,
proceso forward, clasificador, dinámica inversa, línea base y métricas.
"""
