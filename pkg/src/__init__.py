"""Loop TAD: 분해 기반 시계열 이상 탐지 패키지"""
