# PEND partition toolkit source package
