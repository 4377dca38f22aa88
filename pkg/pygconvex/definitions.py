SCHEMA_PACKAGE = 'pygconvex.core.resources.schema'
