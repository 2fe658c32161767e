"""phaseless-farfield test suite"""
