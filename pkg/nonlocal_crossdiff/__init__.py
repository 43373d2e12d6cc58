default_app_config = 'nonlocal_crossdiff.apps.CrossDiffConfig'
