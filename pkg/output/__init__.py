"""Report, chart and mesh writers"""
