fn main() {
    accperc::cli::main_entry()
}
