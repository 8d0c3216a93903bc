from fusion360gym_client import Fusion360GymClient

client = Fusion360GymClient("http://127.0.0.1:8080")
client.clear()

response = client.add_sketch("XY")
sketch_1 = response.json()["data"]["sketch_name"]
response = client.add_line(sketch_1, {"x": 0.000000, "y": 0.000000}, {"x": 8.000000, "y": 0.000000})
response = client.add_line(sketch_1, {"x": 8.000000, "y": 0.000000}, {"x": 0.000000, "y": 8.000000})
response = client.add_line(sketch_1, {"x": 0.000000, "y": 8.000000}, {"x": 0.000000, "y": 0.000000})
profiles = response.json()["data"]["profiles"]
profile_1 = list(profiles.keys())[0]
response = client.add_extrude(sketch_1, profile_1, 5.000000, "NewBodyFeatureOperation")

client.detach()
