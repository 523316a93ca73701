"""Test suite for nullspace-embed"""
