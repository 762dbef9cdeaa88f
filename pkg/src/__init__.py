"""
CRS-Array-Optimizer - 化学电阻传感器阵列的节能优化

模型委员会选传感器 → Blue/Green 工作模式 → 理论边界与 Monte Carlo 交叉验证
"""
