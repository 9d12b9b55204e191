"""Reference ChaCha8 stream with PCG32 seed expansion.

Prints the first uniforms `(next_u64 >> 11) * 2^-53` for a few seeds. Used to
pin the generator stream in the Rust tests.
"""
M=0xffffffff
def rotl(x,n): return ((x<<n)|(x>>(32-n)))&M
def qr(s,a,b,c,d):
    s[a]=(s[a]+s[b])&M; s[d]=rotl(s[d]^s[a],16)
    s[c]=(s[c]+s[d])&M; s[b]=rotl(s[b]^s[c],12)
    s[a]=(s[a]+s[b])&M; s[d]=rotl(s[d]^s[a],8)
    s[c]=(s[c]+s[d])&M; s[b]=rotl(s[b]^s[c],7)
def block(key,ctr,rounds=8):
    st=[0x61707865,0x3320646e,0x79622d32,0x6b206574]+key+[ctr&M,ctr>>32,0,0]
    s=st[:]
    for _ in range(rounds//2):
        qr(s,0,4,8,12);qr(s,1,5,9,13);qr(s,2,6,10,14);qr(s,3,7,11,15)
        qr(s,0,5,10,15);qr(s,1,6,11,12);qr(s,2,7,8,13);qr(s,3,4,9,14)
    return [(s[i]+st[i])&M for i in range(16)]
def seed_from_u64(seed):
    MUL=6364136223846793005; INC=11634580027462260723; st=seed; out=b''
    for _ in range(8):
        st=(st*MUL+INC)&((1<<64)-1)
        xs=((((st>>18)^st)>>27))&M; rot=st>>59
        x=((xs>>rot)|(xs<<((32-rot)&31)))&M
        out+=x.to_bytes(4,'little')
    return [int.from_bytes(out[i:i+4],'little') for i in range(0,32,4)]
def uniforms(seed,count):
    key=seed_from_u64(seed); words=[]; ctr=0
    while len(words)<2*count:
        words+=block(key,ctr); ctr+=1
    res=[]
    for i in range(count):
        u=words[2*i]|(words[2*i+1]<<32)
        res.append((u>>11)*2.0**-53)
    return res
if __name__=='__main__':
    for s in (0,7):
        print(s,[repr(v) for v in uniforms(s,4)])
