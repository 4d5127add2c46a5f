"""
HyperChange: self-supervised hyperspectral change detection toolkit
"""
